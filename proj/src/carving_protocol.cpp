#include "carving/carving_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carving {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

int excited_count(std::size_t basis) { return static_cast<int>((basis >> 1) & 1u) + static_cast<int>(basis & 1u); }

double squared_norm(const PairAmps &a) {
    double s = 0.0;
    for (const auto &x : a) s += std::norm(x);
    return s;
}

// Rescaled so the first significant component is real and positive with
// unit modulus. Ideal-limit outputs become exact 0/+-1 patterns.
PairAmps phase_fixed(PairAmps a) {
    double largest = 0.0;
    for (const auto &x : a) largest = std::max(largest, std::abs(x));
    if (largest == 0.0) return a;
    for (const auto &x : a) {
        if (std::abs(x) > 1e-12 * largest) {
            const cplx scale = std::conj(x) / std::norm(x);
            for (auto &y : a) {
                y *= scale;
                if (std::abs(y.real()) < 1e-14) y.real(0.0);
                if (std::abs(y.imag()) < 1e-14) y.imag(0.0);
            }
            break;
        }
    }
    return a;
}

PairAmps normalized(PairAmps a) {
    const double n = std::sqrt(squared_norm(a));
    if (n == 0.0) return a;
    for (auto &x : a) x /= n;
    return a;
}

// Apply a single-qubit Pauli to one atom (bit = 1 for the first atom, 0 for the second).
PairAmps apply_pauli(Pauli p, int bit, const PairAmps &in) {
    const std::size_t mask = std::size_t{1} << bit;
    PairAmps out{};
    for (std::size_t i = 0; i < 4; ++i) {
        const bool one = (i & mask) != 0;
        switch (p) {
        case Pauli::I: out[i] += in[i]; break;
        case Pauli::X: out[i ^ mask] += in[i]; break;
        case Pauli::Z: out[i] += one ? -in[i] : in[i]; break;
        case Pauli::Y: out[i ^ mask] += (one ? cplx(0, -1) : cplx(0, 1)) * in[i]; break;
        }
    }
    return out;
}

} // namespace

std::string_view to_string(Detector d) {
    switch (d) {
    case Detector::D1: return "D1";
    case Detector::D2: return "D2";
    case Detector::D3: return "D3";
    }
    return "?";
}

std::string_view to_string(Protocol p) { return p == Protocol::efficient ? "efficient" : "standard"; }

Detector parse_detector(std::string_view label) {
    if (label == "D1") return Detector::D1;
    if (label == "D2") return Detector::D2;
    if (label == "D3") return Detector::D3;
    throw std::invalid_argument("unknown detector label '" + std::string(label) + "'");
}

Protocol parse_protocol(std::string_view label) {
    if (label == "efficient") return Protocol::efficient;
    if (label == "standard") return Protocol::standard;
    throw std::invalid_argument("unknown protocol '" + std::string(label) + "' (expected efficient|standard)");
}

const DetectorOutcome &CarveResult::outcome(Detector d) const {
    for (const auto &o : outcomes)
        if (o.detector == d) return o;
    throw std::out_of_range("no outcome for detector " + std::string(to_string(d)));
}

PhotonAtomState PhotonAtomState::with_input(const PairAmps &atoms) {
    PhotonAtomState s;
    s.modes[input] = atoms;
    return s;
}

double PhotonAtomState::weight(Mode m) const { return squared_norm(modes[m]); }

PairAmps plus_plus() { return {cplx(0.5), cplx(0.5), cplx(0.5), cplx(0.5)}; }

namespace stages {

void cavity_pass(PhotonAtomState &state, PhotonAtomState::Mode from, PhotonAtomState::Mode to_reflected,
                 PhotonAtomState::Mode to_transmitted, const CoeffSet &coeffs, bool keep_transmitted) {
    const PairAmps incoming = state.modes[from];
    state.modes[from] = {};
    for (std::size_t i = 0; i < 4; ++i) {
        const ScatterCoeffs &c = coeffs[excited_count(i)];
        const cplx a = incoming[i];
        state.modes[to_reflected][i] += c.r * a;
        if (keep_transmitted) {
            state.modes[to_transmitted][i] += c.t * a;
            state.discarded += std::norm(a) * c.loss_prob;
        } else {
            state.discarded += std::norm(a) * (c.loss_prob + std::norm(c.t));
        }
    }
}

void flip_atoms(PhotonAtomState &state) {
    for (auto &m : state.modes) m = {m[3], m[2], m[1], m[0]};
}

void interfere(PhotonAtomState &state) {
    using M = PhotonAtomState;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto [d2, d3] = beam_split(state.modes[M::transmitted][i], state.modes[M::reflected_transmitted][i]);
        state.modes[M::d2][i] += d2;
        state.modes[M::d3][i] += d3;
    }
    state.modes[M::transmitted] = {};
    state.modes[M::reflected_transmitted] = {};
}

void route_double_reflection(PhotonAtomState &state) {
    using M = PhotonAtomState;
    for (std::size_t i = 0; i < 4; ++i) state.modes[M::d1][i] += state.modes[M::double_reflected][i];
    state.modes[M::double_reflected] = {};
}

} // namespace stages

std::pair<cplx, cplx> beam_split(cplx t_amp, cplx rt_amp) {
    return {(t_amp + rt_amp) * kInvSqrt2, (t_amp - rt_amp) * kInvSqrt2};
}

PhotonAtomState propagate_efficient(const PairAmps &atoms, const CoeffSet &coeffs) {
    using M = PhotonAtomState;
    PhotonAtomState s = PhotonAtomState::with_input(atoms);
    stages::cavity_pass(s, M::input, M::reflected, M::transmitted, coeffs);
    // mirror + NOT x NOT on both atoms
    stages::flip_atoms(s);
    stages::cavity_pass(s, M::reflected, M::double_reflected, M::reflected_transmitted, coeffs);
    stages::interfere(s);
    stages::route_double_reflection(s);
    return s;
}

PhotonAtomState propagate_standard(const PairAmps &atoms, const CoeffSet &coeffs) {
    using M = PhotonAtomState;
    PhotonAtomState s = PhotonAtomState::with_input(atoms);
    stages::cavity_pass(s, M::input, M::reflected, M::transmitted, coeffs, false);
    stages::flip_atoms(s);
    // second photon, heralded on reflection as well
    stages::cavity_pass(s, M::reflected, M::double_reflected, M::reflected_transmitted, coeffs, false);
    stages::route_double_reflection(s);
    return s;
}

std::vector<Detector> detectors_of(Protocol protocol) {
    if (protocol == Protocol::standard) return {Detector::D1};
    return {Detector::D1, Detector::D2, Detector::D3};
}

namespace {

PhotonAtomState propagate(Protocol protocol, const PairAmps &atoms, const CoeffSet &coeffs) {
    return protocol == Protocol::efficient ? propagate_efficient(atoms, coeffs) : propagate_standard(atoms, coeffs);
}

PhotonAtomState::Mode mode_of(Detector d) {
    switch (d) {
    case Detector::D1: return PhotonAtomState::d1;
    case Detector::D2: return PhotonAtomState::d2;
    case Detector::D3: return PhotonAtomState::d3;
    }
    return PhotonAtomState::d1;
}

} // namespace

namespace {

// Unnormalized ideal-limit output pattern (entries 0 or +-1).
const PairAmps &target_pattern(Protocol protocol, Detector detector) {
    if (protocol == Protocol::standard && detector != Detector::D1) {
        throw std::invalid_argument("standard protocol heralds on D1 only");
    }
    static const auto patterns = [] {
        std::array<std::array<PairAmps, 3>, 2> out{};
        const PhotonAtomState eff = propagate_efficient(plus_plus(), ideal_coefficients());
        const PhotonAtomState std_ = propagate_standard(plus_plus(), ideal_coefficients());
        for (Detector d : {Detector::D1, Detector::D2, Detector::D3}) {
            out[0][static_cast<int>(d)] = phase_fixed(eff.modes[mode_of(d)]);
            out[1][static_cast<int>(d)] = phase_fixed(std_.modes[mode_of(d)]);
        }
        return out;
    }();
    return patterns[protocol == Protocol::efficient ? 0 : 1][static_cast<int>(detector)];
}

} // namespace

PairAmps detector_target(Protocol protocol, Detector detector) {
    return normalized(target_pattern(protocol, detector));
}

double conditional_fidelity(const PairAmps &target, const PairAmps &psi) {
    const double norm = squared_norm(psi) * squared_norm(target);
    if (norm == 0.0) return 0.0;
    cplx overlap(0.0);
    for (std::size_t i = 0; i < 4; ++i) overlap += std::conj(target[i]) * psi[i];
    return std::min(1.0, std::norm(overlap) / norm);
}

CarveResult carve_with(Protocol protocol, const CavityParams &params, const CoeffSet &coeffs) {
    CarveResult result;
    result.protocol = protocol;
    result.params = params;

    const PhotonAtomState final_state = propagate(protocol, plus_plus(), coeffs);
    double weighted = 0.0;
    double defined_probability = 0.0;
    for (Detector d : detectors_of(protocol)) {
        DetectorOutcome o;
        o.detector = d;
        o.amplitudes = final_state.modes[mode_of(d)];
        o.probability = squared_norm(o.amplitudes);
        o.target = detector_target(protocol, d);
        o.fidelity_defined = o.probability > 0.0;
        o.fidelity = o.fidelity_defined ? conditional_fidelity(target_pattern(protocol, d), o.amplitudes) : 0.0;
        result.p_total += o.probability;
        if (o.fidelity_defined) {
            weighted += o.fidelity * o.probability;
            defined_probability += o.probability;
        }
        result.outcomes.push_back(o);
    }
    result.p_loss = final_state.discarded;
    result.f_weighted = weighted;
    result.f_avg = defined_probability > 0.0 ? weighted / defined_probability : 0.0;
    return result;
}

CarveResult carve_efficient(const CavityParams &params) {
    const CavityParams p = validate_params(params);
    return carve_with(Protocol::efficient, p, coefficient_set(p));
}

CarveResult carve_standard(const CavityParams &params) {
    const CavityParams p = validate_params(params);
    return carve_with(Protocol::standard, p, coefficient_set(p));
}

CarveResult carve(Protocol protocol, const CavityParams &params) {
    return protocol == Protocol::efficient ? carve_efficient(params) : carve_standard(params);
}

std::vector<DetectorKraus> detector_kraus(Protocol protocol, const CoeffSet &coeffs) {
    std::vector<DetectorKraus> out;
    for (Detector d : detectors_of(protocol)) out.push_back({d, {}});

    for (std::size_t basis = 0; basis < 4; ++basis) {
        PairAmps input{};
        input[basis] = 1.0;
        const PhotonAtomState s = propagate(protocol, input, coeffs);
        const std::size_t flipped = 3 - basis;
        for (auto &k : out) k.diag[basis] = s.modes[mode_of(k.detector)][flipped];
    }
    return out;
}

PauliFrame correction_for(Detector detector) {
    switch (detector) {
    case Detector::D1: return {Pauli::I, Pauli::I};
    case Detector::D2: return {Pauli::Z, Pauli::X};
    case Detector::D3: return {Pauli::I, Pauli::X};
    }
    throw std::invalid_argument("unknown detector");
}

PairAmps apply_pauli_frame(const PauliFrame &frame, const PairAmps &amps) {
    // Second atom first, then the first; the two commute anyway.
    return apply_pauli(frame.first, 1, apply_pauli(frame.second, 0, amps));
}

} // namespace carving
