#ifndef HYPERFIX_SCENARIO_HPP
#define HYPERFIX_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hyperfix {

struct RunOptions {
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  bool timings = false;  // adds a wall_ms column; off by default so reruns
                         // with one seed are byte-identical
};

struct ScenarioOutcome {
  std::string name;
  std::string kind;
  double final_residual;  // the scenario's headline scalar
  std::size_t iterations;
  double wall_ms;
};

/// Runs every scenario in a config file (a single scenario object or
/// {"scenarios": [...]}), writing per-scenario artifacts under
/// out_dir/<name>/ and an aggregate summary.csv. Throws on failure.
std::vector<ScenarioOutcome> run_scenario_file(const std::string& path,
                                               const RunOptions& opts);

/// CLI wrapper: runs the file, prints a per-scenario report, and maps
/// failures to exit codes (1 invalid config, 2 numerical failure,
/// 3 precondition violation).
int run_cli(const std::string& path, const RunOptions& opts);

/// Exit code for the in-flight exception, per the scheme above.
int exit_code_for_active_exception();

}  // namespace hyperfix

#endif
