#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "carving/cavity_io.hpp"
#include "carving/table.hpp"

namespace carving::cli {

/// Fully resolved command-line / config-file settings.
struct RunConfig {
    std::string command; // coeffs | carve | standard | sweep | scaling | graph
    CavityParams params;
    std::string output = "-";
    std::string format = "csv";

    std::vector<int> n_atoms{0, 1, 2};                              // coeffs
    std::vector<std::string> axes;                                  // sweep
    std::vector<std::string> quantities{"f_avg", "p_total", "f_weighted"}; // sweep
    std::string dependent = "kappa_sc_frac";                        // sweep
    std::string mode = "efficient";                                 // sweep, scaling, graph ("both" for graph)
    std::string method = "product-model";                           // sweep, graph ("both" for graph)
    std::vector<int> n_nodes{2};                                    // sweep (first value), graph
    std::vector<double> c_values{50, 100, 200, 400};                // scaling
    std::string quantity = "f_avg";                                 // scaling
    unsigned threads = 0;
};

/**
 * Parses argv. A `--config FILE` holds one `key=value` per line (keys are the
 * long option names, `#` starts a comment); flags given on the command line
 * override the file. Throws std::invalid_argument on any parse problem;
 * `--help` output is written to `out` and an empty command is returned.
 */
RunConfig parse_command_line(int argc, const char *const *argv, std::ostream &out);

/// Builds the result table for a config, with the config echoed as metadata.
Table build_table(const RunConfig &config);

/// Runs the config and writes its table to config.output (or `out`).
/// Returns the process exit status; diagnostics go to `err`.
int dispatch(const RunConfig &config, std::ostream &out, std::ostream &err);

/// argv entry point used by the carvesim tool.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace carving::cli
