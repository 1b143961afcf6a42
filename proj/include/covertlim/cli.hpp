#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "covertlim/scenario.hpp"

// Command dispatch, grid parsing and deterministic CSV/JSON emission for the
// command-line front end. Kept in the library so the tests can exercise it
// without spawning processes.

namespace covertlim {

/// Grid syntax "lo:hi:log:count" or "lo:hi:lin:count".
std::vector<double> parse_grid(const std::string& spec);

struct RunConfig {
    std::string command;  // energy-limits | covert-bound | covert-curves |
                          // perfect-covert | heatmap | oracle-check
    ScenarioParams scenario;
    std::vector<std::int64_t> m_grid;
    std::vector<double> nb_grid;
    std::vector<double> eps_grid;
    double ns = -1.0;  // probe energy override where meaningful
    std::string output_path = "-";
    std::string format = "csv";  // csv | json
    int threads = 0;             // 0: runtime default
};

/// Formats a double with 17 significant digits (shortest round-trippable
/// representation used across all emitted files).
std::string format_double(double v);

/// Executes the configured command, writing the result table to `out` and
/// JSON-line warnings to `warn`. Returns the process exit status: 0 on
/// success, 2 when any grid point raised a solver flag (partial results are
/// still written), 1 on configuration errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& warn);

/// Convenience wrapper handling output_path ("-" = stdout) and format.
int run_to_path(const RunConfig& config, std::ostream& warn);

}  // namespace covertlim
