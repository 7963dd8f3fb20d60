#pragma once

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "carving/carving_protocol.hpp"
#include "carving/metrics.hpp"

namespace carving {

/// Row-major 2x2 matrix.
using Mat2 = std::array<cplx, 4>;
/// Row-major 4x4 matrix on a qubit pair, basis index 2*a + b.
using Mat4 = std::array<cplx, 16>;

Mat2 identity2();
Mat2 hadamard();
Mat2 pauli_matrix(Pauli p);

/**
 * Dense amplitude vector over n qubits. Qubit q is bit q of the basis
 * index. The state may be subnormalized; its squared norm is the heralding
 * probability accumulated so far.
 */
class QubitRegister {
  public:
    static constexpr int kMaxQubits = 20;

    /// |0...0>
    explicit QubitRegister(int n_qubits);
    QubitRegister(int n_qubits, std::vector<cplx> amplitudes);

    /// |+>^n
    static QubitRegister plus_state(int n_qubits);

    int size() const { return n_; }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }

    double norm2() const;
    /// <this|other>
    cplx inner(const QubitRegister &other) const;

    void apply_1q(int qubit, const Mat2 &u);
    /// Applies a pair operator; `first` supplies the high bit of the pair index.
    void apply_2q(int first, int second, const Mat4 &m);

    /// Reduced density matrix (row-major, 2^k x 2^k) of `qubits`, in the order
    /// given (qubits[0] is the most significant bit of the local index).
    std::vector<cplx> reduced_density(std::span<const int> qubits) const;

  private:
    void check_qubit(int q) const;

    int n_;
    std::vector<cplx> amps_;
};

/**
 * Local single-qubit basis changes wrapped around a carve. `pre_*` act
 * before the photon interacts with the pair, `post_*` after the
 * detector-conditioned correction.
 */
struct LocalFrame {
    Mat2 pre_first = identity2();
    Mat2 pre_second = identity2();
    Mat2 post_first = identity2();
    Mat2 post_second = identity2();

    static LocalFrame identity() { return {}; }
    /// U before, U^dagger after.
    static LocalFrame conjugation(const Mat2 &first, const Mat2 &second);
    /**
     * Frame used for chain growth: Hadamard on the newly added qubit after the
     * carve. The parity projection followed by this rotation realises a CZ
     * edge between the chain end and the new qubit (up to local Paulis).
     */
    static LocalFrame chain_default();
};

/// Full pair operator post * correction * (X x X) * diag(kraus) * pre.
Mat4 carve_operator(const DetectorKraus &kraus, const LocalFrame &frame);

/**
 * Applies the detector-conditioned carving map to the qubit pair
 * (pair.first, pair.second), including the Pauli correction for that
 * detector. The result is subnormalized by the outcome probability.
 */
QubitRegister apply_carve_map(const QubitRegister &reg, std::pair<int, int> pair, Detector detector,
                              const CoeffSet &coeffs, Protocol protocol = Protocol::efficient,
                              const LocalFrame &frame = LocalFrame::identity());

enum class GrowthMethod { product_model, exact_register };

std::string_view to_string(GrowthMethod m);
GrowthMethod parse_growth_method(std::string_view label);

struct GraphResult {
    int n_nodes = 0;
    double p_total = 0.0;
    double f_estimate = 0.0;
    Protocol mode = Protocol::efficient;
    GrowthMethod method = GrowthMethod::product_model;
};

/// Independent steps: p = p_step^(n-1), F = f_step^(n-1).
GraphResult product_model(int n_nodes, const MetricsReport &per_step, Protocol mode);

/**
 * Linear chain grown by carving each new |+> qubit against the chain end.
 *
 * The exact method sums over every detector history (3^(n-1) branches for
 * the efficient protocol, zero-probability branches pruned), so its cost
 * grows as 3^(n-1) * 2^n. Fidelity is measured against the chain built by
 * the ideal-limit maps.
 */
GraphResult grow_chain(int n_nodes, const CavityParams &params, Protocol mode, GrowthMethod method);

/// Chain produced by ideal-limit carving, normalized.
QubitRegister ideal_chain(int n_nodes, Protocol mode);

} // namespace carving
