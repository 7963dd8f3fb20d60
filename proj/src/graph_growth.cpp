#include "carving/graph_growth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace carving {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Mat2 adjoint(const Mat2 &u) { return {std::conj(u[0]), std::conj(u[2]), std::conj(u[1]), std::conj(u[3])}; }

Mat4 kron(const Mat2 &a, const Mat2 &b) {
    Mat4 m{};
    for (int ra = 0; ra < 2; ++ra)
        for (int rb = 0; rb < 2; ++rb)
            for (int ca = 0; ca < 2; ++ca)
                for (int cb = 0; cb < 2; ++cb) m[(2 * ra + rb) * 4 + 2 * ca + cb] = a[2 * ra + ca] * b[2 * rb + cb];
    return m;
}

Mat4 multiply(const Mat4 &a, const Mat4 &b) {
    Mat4 m{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const cplx aik = a[i * 4 + k];
            if (aik == cplx(0.0)) continue;
            for (int j = 0; j < 4; ++j) m[i * 4 + j] += aik * b[k * 4 + j];
        }
    return m;
}

} // namespace

Mat2 identity2() { return {cplx(1), cplx(0), cplx(0), cplx(1)}; }

Mat2 hadamard() { return {cplx(kInvSqrt2), cplx(kInvSqrt2), cplx(kInvSqrt2), cplx(-kInvSqrt2)}; }

Mat2 pauli_matrix(Pauli p) {
    switch (p) {
    case Pauli::I: return identity2();
    case Pauli::X: return {cplx(0), cplx(1), cplx(1), cplx(0)};
    case Pauli::Y: return {cplx(0), cplx(0, -1), cplx(0, 1), cplx(0)};
    case Pauli::Z: return {cplx(1), cplx(0), cplx(0), cplx(-1)};
    }
    return identity2();
}

// ---------------------------------------------------------------------------
// QubitRegister

QubitRegister::QubitRegister(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 2 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("register size " + std::to_string(n_qubits) + " outside [2, " +
                                    std::to_string(kMaxQubits) + "]");
    }
    amps_.assign(std::size_t{1} << n_, cplx(0.0));
    amps_[0] = 1.0;
}

QubitRegister::QubitRegister(int n_qubits, std::vector<cplx> amplitudes) : QubitRegister(n_qubits) {
    if (amplitudes.size() != amps_.size()) {
        throw std::invalid_argument("expected " + std::to_string(amps_.size()) + " amplitudes, got " +
                                    std::to_string(amplitudes.size()));
    }
    amps_ = std::move(amplitudes);
    if (norm2() > 1.0 + 1e-12) throw std::invalid_argument("register norm exceeds 1");
}

QubitRegister QubitRegister::plus_state(int n_qubits) {
    QubitRegister reg(n_qubits);
    const double a = std::pow(2.0, -0.5 * n_qubits);
    for (auto &x : reg.amps_) x = a;
    return reg;
}

double QubitRegister::norm2() const {
    double s = 0.0;
    for (const auto &a : amps_) s += std::norm(a);
    return s;
}

cplx QubitRegister::inner(const QubitRegister &other) const {
    if (other.n_ != n_) throw std::invalid_argument("inner product of registers of different size");
    cplx s(0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
    return s;
}

void QubitRegister::check_qubit(int q) const {
    if (q < 0 || q >= n_) {
        throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " + std::to_string(n_) +
                                "-qubit register");
    }
}

void QubitRegister::apply_1q(int qubit, const Mat2 &u) {
    check_qubit(qubit);
    const std::size_t mask = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & mask) continue;
        const cplx a0 = amps_[i], a1 = amps_[i | mask];
        amps_[i] = u[0] * a0 + u[1] * a1;
        amps_[i | mask] = u[2] * a0 + u[3] * a1;
    }
}

void QubitRegister::apply_2q(int first, int second, const Mat4 &m) {
    check_qubit(first);
    check_qubit(second);
    if (first == second) throw std::invalid_argument("pair qubits must be distinct");
    const std::size_t mf = std::size_t{1} << first, ms = std::size_t{1} << second;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & (mf | ms)) continue;
        const std::array<std::size_t, 4> idx{i, i | ms, i | mf, i | mf | ms};
        std::array<cplx, 4> in;
        for (int k = 0; k < 4; ++k) in[k] = amps_[idx[k]];
        for (int r = 0; r < 4; ++r) {
            cplx acc(0.0);
            for (int c = 0; c < 4; ++c) acc += m[r * 4 + c] * in[c];
            amps_[idx[r]] = acc;
        }
    }
}

std::vector<cplx> QubitRegister::reduced_density(std::span<const int> qubits) const {
    std::size_t kept = 0;
    for (int q : qubits) {
        check_qubit(q);
        const std::size_t bit = std::size_t{1} << q;
        if (kept & bit) throw std::invalid_argument("duplicate qubit in reduced_density");
        kept |= bit;
    }
    const std::size_t k = qubits.size();
    const std::size_t dim = std::size_t{1} << k;

    auto scatter = [&](std::size_t local) {
        std::size_t bits = 0;
        for (std::size_t j = 0; j < k; ++j)
            if (local & (std::size_t{1} << (k - 1 - j))) bits |= std::size_t{1} << qubits[j];
        return bits;
    };
    std::vector<std::size_t> local_bits(dim);
    for (std::size_t l = 0; l < dim; ++l) local_bits[l] = scatter(l);

    std::vector<cplx> rho(dim * dim, cplx(0.0));
    for (std::size_t rest = 0; rest < amps_.size(); ++rest) {
        if (rest & kept) continue;
        for (std::size_t r = 0; r < dim; ++r) {
            const cplx ar = amps_[rest | local_bits[r]];
            if (ar == cplx(0.0)) continue;
            for (std::size_t c = 0; c < dim; ++c) rho[r * dim + c] += ar * std::conj(amps_[rest | local_bits[c]]);
        }
    }
    return rho;
}

// ---------------------------------------------------------------------------
// Carving maps

LocalFrame LocalFrame::conjugation(const Mat2 &first, const Mat2 &second) {
    LocalFrame f;
    f.pre_first = first;
    f.pre_second = second;
    f.post_first = adjoint(first);
    f.post_second = adjoint(second);
    return f;
}

LocalFrame LocalFrame::chain_default() {
    LocalFrame f;
    f.post_second = hadamard();
    return f;
}

Mat4 carve_operator(const DetectorKraus &kraus, const LocalFrame &frame) {
    // |ab> -> diag[ab] |(1-a)(1-b)>
    Mat4 flip_diag{};
    for (int i = 0; i < 4; ++i) flip_diag[(3 - i) * 4 + i] = kraus.diag[i];

    const PauliFrame corr = correction_for(kraus.detector);
    const Mat4 correction = kron(pauli_matrix(corr.first), pauli_matrix(corr.second));

    Mat4 m = multiply(flip_diag, kron(frame.pre_first, frame.pre_second));
    m = multiply(correction, m);
    return multiply(kron(frame.post_first, frame.post_second), m);
}

QubitRegister apply_carve_map(const QubitRegister &reg, std::pair<int, int> pair, Detector detector,
                              const CoeffSet &coeffs, Protocol protocol, const LocalFrame &frame) {
    const auto [first, second] = pair;
    if (first == second) throw std::invalid_argument("carve pair must name two distinct qubits");
    if (first < 0 || second < 0 || first >= reg.size() || second >= reg.size()) {
        throw std::out_of_range("carve pair (" + std::to_string(first) + ", " + std::to_string(second) +
                                ") out of range for " + std::to_string(reg.size()) + "-qubit register");
    }
    for (const auto &k : detector_kraus(protocol, coeffs)) {
        if (k.detector != detector) continue;
        QubitRegister out = reg;
        out.apply_2q(first, second, carve_operator(k, frame));
        return out;
    }
    throw std::invalid_argument("detector " + std::string(to_string(detector)) + " cannot fire in the " +
                                std::string(to_string(protocol)) + " protocol");
}

// ---------------------------------------------------------------------------
// Chain growth

std::string_view to_string(GrowthMethod m) {
    return m == GrowthMethod::product_model ? "product-model" : "exact-register";
}

GrowthMethod parse_growth_method(std::string_view label) {
    if (label == "product-model" || label == "product") return GrowthMethod::product_model;
    if (label == "exact-register" || label == "exact") return GrowthMethod::exact_register;
    throw std::invalid_argument("unknown growth method '" + std::string(label) +
                                "' (expected product-model|exact-register)");
}

GraphResult product_model(int n_nodes, const MetricsReport &per_step, Protocol mode) {
    if (n_nodes < 2) throw std::invalid_argument("a graph needs at least 2 nodes, got " + std::to_string(n_nodes));
    GraphResult g;
    g.n_nodes = n_nodes;
    g.mode = mode;
    g.method = GrowthMethod::product_model;
    g.p_total = std::pow(per_step.p_total, n_nodes - 1);
    g.f_estimate = std::pow(per_step.f_avg, n_nodes - 1);
    return g;
}

QubitRegister ideal_chain(int n_nodes, Protocol mode) {
    if (n_nodes < 2) throw std::invalid_argument("a chain needs at least 2 nodes");
    const LocalFrame frame = LocalFrame::chain_default();
    Mat4 d1{};
    for (const auto &k : detector_kraus(mode, ideal_coefficients()))
        if (k.detector == Detector::D1) d1 = carve_operator(k, frame);

    QubitRegister reg = QubitRegister::plus_state(n_nodes);
    for (int s = 1; s < n_nodes; ++s) reg.apply_2q(s - 1, s, d1);
    const double n = std::sqrt(reg.norm2());
    for (auto &a : reg.amplitudes()) a /= n;
    return reg;
}

namespace {

struct HistorySum {
    double probability = 0.0;
    double overlap = 0.0; // sum over histories of |<target|psi>|^2
};

void sum_histories(std::vector<QubitRegister> &levels, int step, const std::vector<Mat4> &ops,
                   const QubitRegister &target, HistorySum &acc) {
    const QubitRegister &current = levels[step - 1];
    if (step == static_cast<int>(levels.size())) {
        acc.probability += current.norm2();
        acc.overlap += std::norm(target.inner(current));
        return;
    }
    for (const Mat4 &op : ops) {
        QubitRegister &next = levels[step];
        std::copy(current.amplitudes().begin(), current.amplitudes().end(), next.amplitudes().begin());
        next.apply_2q(step - 1, step, op);
        if (next.norm2() == 0.0) continue;
        sum_histories(levels, step + 1, ops, target, acc);
    }
}

} // namespace

GraphResult grow_chain(int n_nodes, const CavityParams &params, Protocol mode, GrowthMethod method) {
    if (n_nodes < 2) throw std::invalid_argument("a chain needs at least 2 nodes, got " + std::to_string(n_nodes));
    const CavityParams p = validate_params(params);

    if (method == GrowthMethod::product_model) return product_model(n_nodes, aggregate(carve(mode, p)), mode);

    if (n_nodes > QubitRegister::kMaxQubits) {
        throw std::invalid_argument("exact-register growth is capped at " + std::to_string(QubitRegister::kMaxQubits) +
                                    " qubits, requested " + std::to_string(n_nodes));
    }

    const LocalFrame frame = LocalFrame::chain_default();
    std::vector<Mat4> ops;
    for (const auto &k : detector_kraus(mode, coefficient_set(p))) ops.push_back(carve_operator(k, frame));

    const QubitRegister target = ideal_chain(n_nodes, mode);
    // levels[s] holds the register after s carves
    std::vector<QubitRegister> levels(n_nodes, QubitRegister(n_nodes));
    levels[0] = QubitRegister::plus_state(n_nodes);
    HistorySum acc;
    sum_histories(levels, 1, ops, target, acc);

    GraphResult g;
    g.n_nodes = n_nodes;
    g.mode = mode;
    g.method = GrowthMethod::exact_register;
    g.p_total = acc.probability;
    g.f_estimate = acc.probability > 0.0 ? std::min(1.0, acc.overlap / acc.probability) : 0.0;
    return g;
}

} // namespace carving
