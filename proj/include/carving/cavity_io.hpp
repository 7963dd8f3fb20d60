#pragma once

#include <array>
#include <complex>

namespace carving {

using cplx = std::complex<double>;

/// Tolerance on the kappa-fraction sum and other exact invariants.
inline constexpr double kSumTolerance = 1e-12;

/**
 * Physical knobs of a two-sided cavity.
 *
 * All rates are fractions of the total field decay rate kappa, so that
 * kappa1_frac + kappa2_frac + kappa_sc_frac = 1. The atom-cavity coupling
 * enters only through the cooperativity C = 4 g^2 / (kappa gamma).
 */
struct CavityParams {
    double kappa1_frac = 0.5;   // input mirror
    double kappa2_frac = 0.5;   // output mirror
    double kappa_sc_frac = 0.0; // scattering / absorption
    double cooperativity = 20.0;
    double detuning_frac = 0.0; // probe detuning in units of kappa
    // kappa / gamma; only matters off resonance.
    double kappa_over_gamma = 400.0;
};

/// Single-photon scattering amplitudes for a cavity holding N coupled atoms.
struct ScatterCoeffs {
    cplx r{};
    cplx t{};
    double loss_prob = 0.0;
};

/// Coefficients for N = 0, 1, 2 coupled atoms, indexed by N.
using CoeffSet = std::array<ScatterCoeffs, 3>;

/**
 * Check the CavityParams invariants and return a copy whose fractions sum
 * to exactly one (fractions within kSumTolerance are renormalized).
 *
 * Throws std::invalid_argument naming the violated invariant.
 */
CavityParams validate_params(const CavityParams &params);

/**
 * Reflection and transmission amplitudes for n_atoms atoms in the coupled
 * state. On resonance
 *
 *   r_N = (2 kappa1/kappa) / (1 + N C) - 1
 *   t_N = (2 sqrt(kappa1 kappa2)/kappa) / (1 + N C)
 *
 * so that the empty-cavity reflection is r_0 = -(1 - 2 kappa1/kappa).
 * Off resonance the denominator becomes the complex Lorentzian response
 * (1 - 2i delta) + N C / (1 - 2i delta kappa/gamma).
 */
ScatterCoeffs coefficients(const CavityParams &params, int n_atoms);

/// coefficients() for N = 0, 1, 2.
CoeffSet coefficient_set(const CavityParams &params);

/// Ideal-limit coefficients: r0 = 0, t0 = 1, r1 = r2 = -1, t1 = t2 = 0.
CoeffSet ideal_coefficients();

} // namespace carving
