#include "carving/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace carving {

MetricsReport aggregate(const CarveResult &result) {
    double p_total = 0.0;
    double weighted = 0.0;
    double defined = 0.0;
    for (const auto &o : result.outcomes) {
        p_total += o.probability;
        if (o.fidelity_defined) {
            weighted += o.fidelity * o.probability;
            defined += o.probability;
        }
    }
    if (defined <= 0.0) {
        throw std::domain_error("no detector can fire: all outcome probabilities are zero");
    }

    MetricsReport m;
    m.p_total = p_total;
    m.f_weighted = weighted;
    m.f_avg = weighted / defined;
    m.epsilon1 = 1.0 - 2.0 * result.params.kappa1_frac;
    m.analytic_fidelity = analytic_fidelity(m.epsilon1, result.params.cooperativity);
    return m;
}

double analytic_fidelity(double epsilon1, double cooperativity) {
    if (!(cooperativity > 0.0)) throw std::invalid_argument("cooperativity must be > 0");
    return (1.0 - 0.5 * epsilon1 * epsilon1) - (17.0 / 16.0) / (cooperativity * cooperativity);
}

PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("power-law fit: xs and ys differ in length");
    if (xs.size() < 3) {
        throw std::invalid_argument("power-law fit needs at least 3 samples, got " + std::to_string(xs.size()));
    }
    const std::size_t n = xs.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw std::invalid_argument("power-law fit needs strictly positive samples (sample " + std::to_string(i) +
                                        ": x = " + std::to_string(xs[i]) + ", y = " + std::to_string(ys[i]) + ")");
        }
        sx += std::log(xs[i]);
        sy += std::log(ys[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(xs[i]) - mx, dy = std::log(ys[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("power-law fit: all x values are equal");

    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.coefficient = std::exp(my - fit.exponent * mx);
    // A perfectly flat series is fit exactly.
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

} // namespace carving
