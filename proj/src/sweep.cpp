#include "carving/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace carving {

std::string to_string(SweepParameter p) {
    switch (p) {
    case SweepParameter::kappa1_frac: return "kappa1_frac";
    case SweepParameter::kappa2_frac: return "kappa2_frac";
    case SweepParameter::kappa_sc_frac: return "kappa_sc_frac";
    case SweepParameter::cooperativity: return "cooperativity";
    case SweepParameter::n_nodes: return "n_nodes";
    }
    return "?";
}

SweepParameter parse_sweep_parameter(const std::string &name) {
    if (name == "kappa1_frac" || name == "kappa1") return SweepParameter::kappa1_frac;
    if (name == "kappa2_frac" || name == "kappa2") return SweepParameter::kappa2_frac;
    if (name == "kappa_sc_frac" || name == "kappa_sc") return SweepParameter::kappa_sc_frac;
    if (name == "cooperativity" || name == "C") return SweepParameter::cooperativity;
    if (name == "n_nodes") return SweepParameter::n_nodes;
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> v(static_cast<std::size_t>(std::max(steps, 0)));
    for (int i = 0; i < steps; ++i) {
        v[i] = i == steps - 1 ? max : min + (max - min) * static_cast<double>(i) / (steps - 1);
        if (parameter == SweepParameter::n_nodes) v[i] = std::round(v[i]);
    }
    return v;
}

SweepAxis parse_axis(const std::string &text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 4) throw std::invalid_argument("axis '" + text + "' must look like name:min:max:steps");
    SweepAxis axis;
    axis.parameter = parse_sweep_parameter(parts[0]);
    try {
        std::size_t used = 0;
        axis.min = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("trailing text");
        axis.max = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("trailing text");
        axis.steps = std::stoi(parts[3], &used);
        if (used != parts[3].size()) throw std::invalid_argument("trailing text");
    } catch (const std::logic_error &) {
        throw std::invalid_argument("axis '" + text + "' has a malformed number");
    }
    return axis;
}

namespace {

bool is_fraction(SweepParameter p) {
    return p == SweepParameter::kappa1_frac || p == SweepParameter::kappa2_frac || p == SweepParameter::kappa_sc_frac;
}

const std::set<std::string> &known_quantities() {
    static const std::set<std::string> q{"f_avg",    "p_total", "p_loss",       "f_weighted", "analytic_fidelity",
                                         "epsilon1", "detectors", "coefficients", "graph"};
    return q;
}

bool wants(const SweepSpec &spec, const std::string &q) {
    return std::find(spec.quantities.begin(), spec.quantities.end(), q) != spec.quantities.end();
}

bool has_axis(const SweepSpec &spec, SweepParameter p) {
    return std::any_of(spec.axes.begin(), spec.axes.end(), [p](const SweepAxis &a) { return a.parameter == p; });
}

double &field(CavityParams &p, SweepParameter which) {
    switch (which) {
    case SweepParameter::kappa1_frac: return p.kappa1_frac;
    case SweepParameter::kappa2_frac: return p.kappa2_frac;
    case SweepParameter::kappa_sc_frac: return p.kappa_sc_frac;
    case SweepParameter::cooperativity: return p.cooperativity;
    case SweepParameter::n_nodes: break;
    }
    throw std::logic_error("n_nodes is not a cavity parameter");
}

double field(const CavityParams &p, SweepParameter which) { return field(const_cast<CavityParams &>(p), which); }

std::vector<std::string> quantity_columns(const SweepSpec &spec) {
    std::vector<std::string> cols;
    for (const auto &q : spec.quantities) {
        if (q == "detectors") {
            for (Detector d : detectors_of(spec.mode)) {
                cols.push_back("P_" + std::string(to_string(d)));
                cols.push_back("F_" + std::string(to_string(d)));
            }
        } else if (q == "coefficients") {
            for (int n = 0; n <= 2; ++n) {
                const std::string s = std::to_string(n);
                for (const char *part : {"r", "t"}) {
                    cols.push_back(part + s + "_re");
                    cols.push_back(part + s + "_im");
                }
                cols.push_back("loss" + s);
            }
        } else if (q == "graph") {
            cols.push_back("graph_p_total");
            cols.push_back("graph_f_estimate");
        } else {
            cols.push_back(q);
        }
    }
    return cols;
}

bool needs_nodes_column(const SweepSpec &spec) { return has_axis(spec, SweepParameter::n_nodes) || wants(spec, "graph"); }

std::vector<Cell> evaluate_point(const SweepSpec &spec, const CavityParams &raw, int n_nodes) {
    std::vector<Cell> row{raw.kappa1_frac, raw.kappa2_frac, raw.kappa_sc_frac, raw.cooperativity};
    if (needs_nodes_column(spec)) row.emplace_back(static_cast<std::int64_t>(n_nodes));

    const double dep = field(raw, spec.dependent);
    const std::size_t n_quantity_cols = quantity_columns(spec).size();
    if (dep < -kSumTolerance || dep > 1.0 + kSumTolerance) {
        row.resize(row.size() + n_quantity_cols);
        row.emplace_back(std::string("skipped"));
        return row;
    }
    CavityParams p = raw;
    field(p, spec.dependent) = std::clamp(dep, 0.0, 1.0);
    p = validate_params(p);

    const CarveResult result = carve(spec.mode, p);
    const double epsilon1 = 1.0 - 2.0 * p.kappa1_frac;
    for (const auto &q : spec.quantities) {
        if (q == "f_avg") {
            row.emplace_back(result.f_avg);
        } else if (q == "p_total") {
            row.emplace_back(result.p_total);
        } else if (q == "p_loss") {
            row.emplace_back(result.p_loss);
        } else if (q == "f_weighted") {
            row.emplace_back(result.f_weighted);
        } else if (q == "analytic_fidelity") {
            row.emplace_back(analytic_fidelity(epsilon1, p.cooperativity));
        } else if (q == "epsilon1") {
            row.emplace_back(epsilon1);
        } else if (q == "detectors") {
            for (const auto &o : result.outcomes) {
                row.emplace_back(o.probability);
                row.push_back(o.fidelity_defined ? Cell(o.fidelity) : Cell(std::monostate{}));
            }
        } else if (q == "coefficients") {
            for (const auto &c : coefficient_set(p)) {
                row.emplace_back(c.r.real());
                row.emplace_back(c.r.imag());
                row.emplace_back(c.t.real());
                row.emplace_back(c.t.imag());
                row.emplace_back(c.loss_prob);
            }
        } else if (q == "graph") {
            const GraphResult g = grow_chain(n_nodes, p, spec.mode, spec.graph_method);
            row.emplace_back(g.p_total);
            row.emplace_back(g.f_estimate);
        }
    }
    row.emplace_back(std::string("ok"));
    return row;
}

} // namespace

void validate_sweep(const SweepSpec &spec) {
    if (spec.axes.size() > 2) throw std::invalid_argument("a sweep has at most 2 axes");
    if (!is_fraction(spec.dependent)) {
        throw std::invalid_argument("the dependent parameter must be one of the kappa fractions");
    }
    std::set<SweepParameter> seen;
    for (const auto &axis : spec.axes) {
        const std::string name = to_string(axis.parameter);
        if (!seen.insert(axis.parameter).second) throw std::invalid_argument("axis " + name + " given twice");
        if (axis.parameter == spec.dependent) {
            throw std::invalid_argument("axis " + name + " is the dependent fraction; pick another dependent");
        }
        if (axis.steps < 2) throw std::invalid_argument("axis " + name + " needs at least 2 steps");
        if (!std::isfinite(axis.min) || !std::isfinite(axis.max)) {
            throw std::invalid_argument("axis " + name + " has a non-finite bound");
        }
        if (is_fraction(axis.parameter) &&
            (std::min(axis.min, axis.max) < 0.0 || std::max(axis.min, axis.max) > 1.0)) {
            throw std::invalid_argument("axis " + name + " must stay within [0, 1]");
        }
        if (axis.parameter == SweepParameter::cooperativity && std::min(axis.min, axis.max) <= 0.0) {
            throw std::invalid_argument("cooperativity axis must be > 0");
        }
        if (axis.parameter == SweepParameter::n_nodes && std::min(axis.min, axis.max) < 2.0) {
            throw std::invalid_argument("n_nodes axis must be >= 2");
        }
    }
    if (spec.quantities.empty()) throw std::invalid_argument("no quantities requested");
    for (const auto &q : spec.quantities) {
        if (!known_quantities().count(q)) throw std::invalid_argument("unknown quantity '" + q + "'");
    }
    if (spec.n_nodes < 2) throw std::invalid_argument("n_nodes must be >= 2");
    if (has_axis(spec, SweepParameter::n_nodes) && !wants(spec, "graph")) {
        throw std::invalid_argument("an n_nodes axis needs the 'graph' quantity");
    }
    if (!(spec.fixed.cooperativity > 0.0) && !has_axis(spec, SweepParameter::cooperativity)) {
        throw std::invalid_argument("cooperativity must be > 0");
    }
}

Table run_sweep(const SweepSpec &spec) {
    validate_sweep(spec);

    Table table;
    table.columns = {"kappa1_frac", "kappa2_frac", "kappa_sc_frac", "cooperativity"};
    if (needs_nodes_column(spec)) table.columns.emplace_back("n_nodes");
    for (auto &c : quantity_columns(spec)) table.columns.push_back(std::move(c));
    table.columns.emplace_back("status");

    std::vector<std::vector<double>> axis_values;
    std::size_t total = 1;
    for (const auto &a : spec.axes) {
        axis_values.push_back(a.values());
        total *= axis_values.back().size();
    }

    auto point = [&](std::size_t flat) {
        CavityParams p = spec.fixed;
        int n_nodes = spec.n_nodes;
        // row-major: the last axis varies fastest
        std::size_t rem = flat;
        for (std::size_t k = spec.axes.size(); k-- > 0;) {
            const auto &vals = axis_values[k];
            const double v = vals[rem % vals.size()];
            rem /= vals.size();
            if (spec.axes[k].parameter == SweepParameter::n_nodes)
                n_nodes = static_cast<int>(v);
            else
                field(p, spec.axes[k].parameter) = v;
        }
        double &dep = field(p, spec.dependent);
        double others = -dep;
        for (auto f : {SweepParameter::kappa1_frac, SweepParameter::kappa2_frac, SweepParameter::kappa_sc_frac})
            others += field(p, f);
        dep = 1.0 - others;
        return evaluate_point(spec, p, n_nodes);
    };

    table.rows.resize(total);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(spec.threads ? spec.threads : hw, total));
    if (workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) table.rows[i] = point(i);
        return table;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < total;) {
                    try {
                        table.rows[i] = point(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return table;
}

ScalingQuantity parse_scaling_quantity(const std::string &name) {
    if (name == "f_avg") return ScalingQuantity::f_avg;
    if (name == "p_total") return ScalingQuantity::p_total;
    if (name == "f_weighted") return ScalingQuantity::f_weighted;
    throw std::invalid_argument("unknown scaling quantity '" + name + "' (expected f_avg|p_total|f_weighted)");
}

std::string to_string(ScalingQuantity q) {
    switch (q) {
    case ScalingQuantity::f_avg: return "f_avg";
    case ScalingQuantity::p_total: return "p_total";
    case ScalingQuantity::f_weighted: return "f_weighted";
    }
    return "?";
}

ScalingCurve scaling_curve(const std::vector<double> &c_values, const CavityParams &params_template,
                           ScalingQuantity quantity, Protocol mode) {
    if (c_values.size() < 3) throw std::invalid_argument("a scaling curve needs at least 3 cooperativity values");
    for (double c : c_values) {
        if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("cooperativity values must be finite and > 0");
    }

    ScalingCurve curve;
    curve.table.columns = {"cooperativity", to_string(quantity), "deficit"};
    std::vector<double> deficits;
    for (double c : c_values) {
        CavityParams p = params_template;
        p.cooperativity = c;
        const CarveResult r = carve(mode, p);
        const double value = quantity == ScalingQuantity::f_avg     ? r.f_avg
                             : quantity == ScalingQuantity::p_total ? r.p_total
                                                                    : r.f_weighted;
        deficits.push_back(1.0 - value);
        curve.table.rows.push_back({c, value, 1.0 - value});
    }
    curve.fit = fit_power_law(c_values, deficits);
    return curve;
}

} // namespace carving
