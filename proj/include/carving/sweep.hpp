#pragma once

#include <string>
#include <vector>

#include "carving/cavity_io.hpp"
#include "carving/carving_protocol.hpp"
#include "carving/graph_growth.hpp"
#include "carving/metrics.hpp"
#include "carving/table.hpp"

namespace carving {

/// Parameters a sweep axis can vary.
enum class SweepParameter { kappa1_frac, kappa2_frac, kappa_sc_frac, cooperativity, n_nodes };

std::string to_string(SweepParameter p);
/// Accepts canonical names plus the short forms kappa1, kappa2, kappa_sc, C.
SweepParameter parse_sweep_parameter(const std::string &name);

struct SweepAxis {
    SweepParameter parameter = SweepParameter::cooperativity;
    double min = 0.0;
    double max = 0.0;
    int steps = 2; // inclusive of both ends

    std::vector<double> values() const;
};

/// Parses "name:min:max:steps".
SweepAxis parse_axis(const std::string &text);

struct SweepSpec {
    std::vector<SweepAxis> axes; // at most two; the first is the outer (slow) index
    CavityParams fixed;
    int n_nodes = 2;
    /**
     * Any of f_avg, p_total, p_loss, f_weighted, analytic_fidelity, epsilon1,
     * detectors (P_Di/F_Di columns), coefficients (r/t/loss for N = 0..2),
     * graph (chain probability and fidelity at n_nodes).
     */
    std::vector<std::string> quantities{"f_avg", "p_total", "f_weighted"};
    Protocol mode = Protocol::efficient;
    /// Fraction recomputed as 1 minus the other two at every grid point.
    SweepParameter dependent = SweepParameter::kappa_sc_frac;
    GrowthMethod graph_method = GrowthMethod::product_model;
    unsigned threads = 0; // 0: hardware concurrency
};

/// Throws std::invalid_argument on the first problem found.
void validate_sweep(const SweepSpec &spec);

/**
 * One row per grid point in row-major order. Columns are the four cavity
 * parameters, n_nodes when relevant, the requested quantities and `status`
 * ("ok", or "skipped" when the dependent fraction leaves [0, 1]).
 */
Table run_sweep(const SweepSpec &spec);

enum class ScalingQuantity { f_avg, p_total, f_weighted };

ScalingQuantity parse_scaling_quantity(const std::string &name);
std::string to_string(ScalingQuantity q);

struct ScalingCurve {
    Table table; // cooperativity, value, deficit
    PowerLawFit fit;
};

/// Evaluates the quantity at each C and fits its deficit 1 - value as a
/// power law in C.
ScalingCurve scaling_curve(const std::vector<double> &c_values, const CavityParams &params_template,
                           ScalingQuantity quantity, Protocol mode = Protocol::efficient);

} // namespace carving
