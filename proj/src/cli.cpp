#include "carving/cli.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "carving/carving_protocol.hpp"
#include "carving/graph_growth.hpp"
#include "carving/metrics.hpp"
#include "carving/sweep.hpp"

namespace carving::cli {

namespace {

const std::vector<std::string> kCommands{"coeffs", "carve", "standard", "sweep", "scaling", "graph"};

template <typename T> std::string join(const std::vector<T> &items) {
    std::ostringstream os;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) os << ',';
        if constexpr (std::is_floating_point_v<T>)
            os << format_number(items[i]);
        else
            os << items[i];
    }
    return os.str();
}

std::vector<std::pair<std::string, std::string>> echo(const RunConfig &c) {
    std::vector<std::pair<std::string, std::string>> m{
        {"command", c.command},
        {"kappa1", format_number(c.params.kappa1_frac)},
        {"kappa2", format_number(c.params.kappa2_frac)},
        {"kappa-sc", format_number(c.params.kappa_sc_frac)},
        {"cooperativity", format_number(c.params.cooperativity)},
        {"detuning", format_number(c.params.detuning_frac)},
        {"kappa-over-gamma", format_number(c.params.kappa_over_gamma)},
    };
    if (c.command == "coeffs") m.emplace_back("n-atoms", join(c.n_atoms));
    if (c.command == "sweep") {
        m.emplace_back("axis", join(c.axes));
        m.emplace_back("quantities", join(c.quantities));
        m.emplace_back("dependent", c.dependent);
        m.emplace_back("mode", c.mode);
        m.emplace_back("method", c.method);
        m.emplace_back("n-nodes", join(c.n_nodes));
    }
    if (c.command == "scaling") {
        m.emplace_back("c-values", join(c.c_values));
        m.emplace_back("quantity", c.quantity);
        m.emplace_back("mode", c.mode);
    }
    if (c.command == "graph") {
        m.emplace_back("n-nodes", join(c.n_nodes));
        m.emplace_back("mode", c.mode);
        m.emplace_back("method", c.method);
    }
    return m;
}

Table coeffs_table(const RunConfig &c) {
    Table t;
    t.columns = {"n_atoms", "r_re", "r_im", "t_re", "t_im", "abs_r", "abs_t", "loss_prob"};
    for (int n : c.n_atoms) {
        const ScatterCoeffs s = coefficients(c.params, n);
        t.rows.push_back({static_cast<std::int64_t>(n), s.r.real(), s.r.imag(), s.t.real(), s.t.imag(),
                          std::abs(s.r), std::abs(s.t), s.loss_prob});
    }
    return t;
}

Table carve_table(const RunConfig &c, Protocol protocol) {
    const CarveResult r = carve(protocol, c.params);
    Table t;
    t.columns = {"protocol", "p_total", "p_loss", "f_avg", "f_weighted", "analytic_fidelity", "epsilon1"};
    const double eps1 = 1.0 - 2.0 * r.params.kappa1_frac;
    std::vector<Cell> row{std::string(to_string(protocol)), r.p_total, r.p_loss, r.f_avg, r.f_weighted,
                          analytic_fidelity(eps1, r.params.cooperativity), eps1};
    for (const auto &o : r.outcomes) {
        t.columns.push_back("P_" + std::string(to_string(o.detector)));
        t.columns.push_back("F_" + std::string(to_string(o.detector)));
        row.emplace_back(o.probability);
        row.push_back(o.fidelity_defined ? Cell(o.fidelity) : Cell(std::monostate{}));
    }
    t.rows.push_back(std::move(row));
    return t;
}

Table sweep_table(const RunConfig &c) {
    SweepSpec spec;
    for (const auto &a : c.axes) spec.axes.push_back(parse_axis(a));
    spec.fixed = c.params;
    spec.quantities = c.quantities;
    spec.mode = parse_protocol(c.mode);
    spec.dependent = parse_sweep_parameter(c.dependent);
    spec.graph_method = parse_growth_method(c.method);
    if (c.n_nodes.size() != 1) throw std::invalid_argument("sweep takes a single --n-nodes value; use an n_nodes axis");
    spec.n_nodes = c.n_nodes.front();
    spec.threads = c.threads;
    return run_sweep(spec);
}

Table scaling_table(const RunConfig &c, std::vector<std::pair<std::string, std::string>> &extra) {
    ScalingCurve curve =
        scaling_curve(c.c_values, c.params, parse_scaling_quantity(c.quantity), parse_protocol(c.mode));
    extra.emplace_back("fit.exponent", format_number(curve.fit.exponent));
    extra.emplace_back("fit.coefficient", format_number(curve.fit.coefficient));
    extra.emplace_back("fit.r_squared", format_number(curve.fit.r_squared));
    return std::move(curve.table);
}

Table graph_table(const RunConfig &c) {
    std::vector<Protocol> modes;
    if (c.mode == "both")
        modes = {Protocol::efficient, Protocol::standard};
    else
        modes = {parse_protocol(c.mode)};
    std::vector<GrowthMethod> methods;
    if (c.method == "both")
        methods = {GrowthMethod::product_model, GrowthMethod::exact_register};
    else
        methods = {parse_growth_method(c.method)};

    Table t;
    t.columns = {"n_nodes", "mode", "method", "p_total", "f_estimate"};
    for (int n : c.n_nodes)
        for (Protocol mode : modes)
            for (GrowthMethod method : methods) {
                const GraphResult g = grow_chain(n, c.params, mode, method);
                t.rows.push_back({static_cast<std::int64_t>(n), std::string(to_string(mode)),
                                  std::string(to_string(method)), g.p_total, g.f_estimate});
            }
    return t;
}

} // namespace

RunConfig parse_command_line(int argc, const char *const *argv, std::ostream &out) {
    RunConfig c;
    CLI::App app{"Single-photon state-carving simulator", "carvesim"};
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "key=value config file (command-line flags override it)");

    app.add_option("command", c.command, "coeffs | carve | standard | sweep | scaling | graph")
        ->check(CLI::IsMember(kCommands));
    app.add_option("--kappa1", c.params.kappa1_frac, "input mirror coupling, fraction of kappa")->capture_default_str();
    app.add_option("--kappa2", c.params.kappa2_frac, "output mirror coupling, fraction of kappa")->capture_default_str();
    app.add_option("--kappa-sc", c.params.kappa_sc_frac, "scattering loss, fraction of kappa")->capture_default_str();
    app.add_option("-C,--cooperativity", c.params.cooperativity, "cooperativity 4g^2/(kappa gamma)")
        ->capture_default_str();
    app.add_option("--detuning", c.params.detuning_frac, "probe detuning in units of kappa")->capture_default_str();
    app.add_option("--kappa-over-gamma", c.params.kappa_over_gamma, "kappa/gamma, used off resonance")
        ->capture_default_str();
    app.add_option("-o,--output", c.output, "output file, '-' for stdout")->capture_default_str();
    app.add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--n-atoms", c.n_atoms, "coeffs: atom counts")->delimiter(',');
    app.add_option("--axis", c.axes, "sweep: name:min:max:steps (up to two)")->delimiter(';');
    app.add_option("--quantities", c.quantities, "sweep: columns to compute")->delimiter(',');
    app.add_option("--dependent", c.dependent, "sweep: kappa fraction fixed by the sum rule")->capture_default_str();
    app.add_option("--mode", c.mode, "efficient | standard (graph also accepts both)")->capture_default_str();
    app.add_option("--method", c.method, "product-model | exact-register (graph also accepts both)")
        ->capture_default_str();
    app.add_option("--n-nodes", c.n_nodes, "graph: node counts; sweep: chain length")->delimiter(',');
    app.add_option("--c-values", c.c_values, "scaling: cooperativity values")->delimiter(',');
    app.add_option("--quantity", c.quantity, "scaling: f_avg | p_total | f_weighted")->capture_default_str();
    app.add_option("--threads", c.threads, "sweep worker threads (0 = all cores)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return RunConfig{};
    } catch (const CLI::ParseError &e) {
        throw std::invalid_argument(e.what());
    }
    if (c.command.empty()) throw std::invalid_argument("missing command (coeffs | carve | standard | sweep | scaling | graph)");
    c.params = validate_params(c.params);
    return c;
}

Table build_table(const RunConfig &c) {
    Table t;
    std::vector<std::pair<std::string, std::string>> extra;
    if (c.command == "coeffs")
        t = coeffs_table(c);
    else if (c.command == "carve")
        t = carve_table(c, Protocol::efficient);
    else if (c.command == "standard")
        t = carve_table(c, Protocol::standard);
    else if (c.command == "sweep")
        t = sweep_table(c);
    else if (c.command == "scaling")
        t = scaling_table(c, extra);
    else if (c.command == "graph")
        t = graph_table(c);
    else
        throw std::invalid_argument("unknown command '" + c.command + "'");
    t.metadata = echo(c);
    for (auto &kv : extra) t.metadata.push_back(std::move(kv));
    return t;
}

int dispatch(const RunConfig &config, std::ostream &out, std::ostream &err) {
    try {
        const Table t = build_table(config);
        emit(t, parse_output_format(config.format), config.output, out);
    } catch (const std::exception &e) {
        err << "carvesim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    RunConfig config;
    try {
        config = parse_command_line(argc, argv, out);
    } catch (const std::exception &e) {
        err << "carvesim: " << e.what() << '\n';
        return 2;
    }
    if (config.command.empty()) return 0; // --help
    return dispatch(config, out, err);
}

} // namespace carving::cli
