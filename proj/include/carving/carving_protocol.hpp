#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "carving/cavity_io.hpp"

namespace carving {

/// Two-atom amplitudes over |00>, |01>, |10>, |11>; index = 2*a + b where a
/// is the first atom.
using PairAmps = std::array<cplx, 4>;

enum class Detector {
    D1, // double reflection
    D2, // (t + rt) / sqrt(2) port
    D3, // (t - rt) / sqrt(2) port
};

enum class Protocol { efficient, standard };

std::string_view to_string(Detector d);
std::string_view to_string(Protocol p);
Detector parse_detector(std::string_view label);
Protocol parse_protocol(std::string_view label);

struct DetectorOutcome {
    Detector detector = Detector::D1;
    PairAmps amplitudes{};  // unnormalized, conditional on this click
    double probability = 0.0;
    // Fidelity against `target`. Zero-probability outcomes carry fidelity 0
    // with fidelity_defined = false.
    double fidelity = 0.0;
    bool fidelity_defined = false;
    PairAmps target{};
};

struct CarveResult {
    Protocol protocol = Protocol::efficient;
    CavityParams params;
    std::vector<DetectorOutcome> outcomes;
    double p_loss = 0.0;     // no detector fires
    double p_total = 0.0;    // sum of outcome probabilities
    double f_avg = 0.0;      // sum F_i P_i / sum P_i over defined outcomes
    double f_weighted = 0.0; // sum F_i P_i

    const DetectorOutcome &outcome(Detector d) const;
};

/**
 * Joint photon/two-atom state during the protocol. Each photonic path mode
 * holds the atomic amplitudes conditioned on the photon being in that mode;
 * probability carried away by cavity loss (or by paths nobody detects) is
 * accumulated in `discarded`.
 */
struct PhotonAtomState {
    enum Mode : std::size_t {
        input,
        transmitted,           // |t>
        reflected,             // |r>
        reflected_transmitted, // |rt>
        double_reflected,      // |rr>
        d1,
        d2,
        d3,
        mode_count
    };

    std::array<PairAmps, mode_count> modes{};
    double discarded = 0.0;

    /// Photon in the input mode, atoms in `atoms`.
    static PhotonAtomState with_input(const PairAmps &atoms);
    double weight(Mode m) const;
};

/// Atoms in |++>.
PairAmps plus_plus();

namespace stages {

/// One cavity pass: the photon in `from` splits into `to_reflected` and
/// `to_transmitted` with amplitudes r_N, t_N (N = atoms in |1>). Passing
/// `keep_transmitted = false` drops the transmitted part into `discarded`.
void cavity_pass(PhotonAtomState &state, PhotonAtomState::Mode from,
                 PhotonAtomState::Mode to_reflected, PhotonAtomState::Mode to_transmitted,
                 const CoeffSet &coeffs, bool keep_transmitted = true);

/// NOT on both atoms, applied to every photonic branch.
void flip_atoms(PhotonAtomState &state);

/// 50/50 interference of the transmitted and reflected-transmitted paths
/// into the D2 and D3 ports.
void interfere(PhotonAtomState &state);

/// Double reflection is routed to D1.
void route_double_reflection(PhotonAtomState &state);

} // namespace stages

/// Returns ((t + rt)/sqrt(2), (t - rt)/sqrt(2)).
std::pair<cplx, cplx> beam_split(cplx t_amp, cplx rt_amp);

/// Full single-photon, two-pass propagation ending with the photon in one
/// of the detector modes (or discarded).
PhotonAtomState propagate_efficient(const PairAmps &atoms, const CoeffSet &coeffs);

/// Two sequential photons, each heralded on reflection, with NOT x NOT in
/// between. The heralded state is left in the D1 mode.
PhotonAtomState propagate_standard(const PairAmps &atoms, const CoeffSet &coeffs);

/// Detectors that can fire for a protocol.
std::vector<Detector> detectors_of(Protocol protocol);

/// Normalized ideal-limit output for a detector, phase-fixed so that the
/// first nonzero component is real and positive. Throws for D2/D3 in the
/// standard protocol.
PairAmps detector_target(Protocol protocol, Detector detector);

/// |<target|psi>|^2 / (<target|target> <psi|psi>); 0 for a zero vector.
double conditional_fidelity(const PairAmps &target, const PairAmps &psi);

CarveResult carve_with(Protocol protocol, const CavityParams &params, const CoeffSet &coeffs);
CarveResult carve_efficient(const CavityParams &params);
CarveResult carve_standard(const CavityParams &params);
CarveResult carve(Protocol protocol, const CavityParams &params);

/**
 * Per-detector two-atom map. The protocol acts on an initial basis state
 * |ab> as  |ab> -> diag[2a+b] |(1-a)(1-b)>, i.e. a diagonal operator
 * followed by the NOT x NOT relabeling.
 */
struct DetectorKraus {
    Detector detector = Detector::D1;
    PairAmps diag{};
};

std::vector<DetectorKraus> detector_kraus(Protocol protocol, const CoeffSet &coeffs);

enum class Pauli { I, X, Y, Z };

/// Pauli acting on the first and on the second atom of a pair.
struct PauliFrame {
    Pauli first = Pauli::I;
    Pauli second = Pauli::I;

    bool operator==(const PauliFrame &) const = default;
};

/**
 * Local correction taking a detector's target Bell state to
 * (|01> + |10>)/sqrt(2):
 *   D1 -> I x I, D2 -> Z x X, D3 -> I x X.
 */
PauliFrame correction_for(Detector detector);

PairAmps apply_pauli_frame(const PauliFrame &frame, const PairAmps &amps);

} // namespace carving
