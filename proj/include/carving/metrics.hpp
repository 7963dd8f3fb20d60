#pragma once

#include <span>

#include "carving/carving_protocol.hpp"

namespace carving {

/// Figures of merit for one carving run, next to the analytic prediction.
struct MetricsReport {
    double f_avg = 0.0;
    double p_total = 0.0;
    double f_weighted = 0.0;
    double analytic_fidelity = 0.0;
    double epsilon1 = 0.0; // 1 - 2 kappa1/kappa, i.e. -r0
};

struct PowerLawFit {
    double exponent = 0.0;
    double coefficient = 0.0;
    double r_squared = 0.0;
};

/// Throws std::domain_error when no outcome has nonzero probability.
MetricsReport aggregate(const CarveResult &result);

/// Analytic average fidelity (1 - eps1^2/2) - (17/16) / C^2.
double analytic_fidelity(double epsilon1, double cooperativity);

/// y = coefficient * x^exponent by least squares on (log x, log y).
/// Needs at least three strictly positive samples.
PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys);

} // namespace carving
