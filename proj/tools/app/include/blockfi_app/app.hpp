#pragma once

// Command-line orchestration: configuration, dispatch and rendering.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <blockfi/serialize.hpp>

namespace blockfi::app {

enum class Format { text, json };

struct RunConfig {
  std::string subcommand;  // theoretical | estimate | simulate | mc-check
  std::optional<std::string> data;
  std::optional<std::string> model;
  std::optional<std::string> partition;
  bool neg_log_returns = false;
  bool monthly_maxima = false;
  std::size_t min_obs = 10;
  std::optional<std::size_t> k;  // sets both the threshold and the Hill k
  std::vector<double> u = {0.95, 0.99};
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  Format format = Format::text;
};

struct RunResult {
  int exit_code = 0;
  std::string output;       // report body (stdout or --out)
  std::string diagnostics;  // warnings and errors (stderr)
};

/// 0 success, 1 configuration or invalid argument, 2 data, 3 numeric.
int exit_code_for(ErrorKind kind);

/// Never throws; failures are mapped to exit codes with a message.
RunResult run_report(const RunConfig& config);

/// Block / eps / FI table with a global row and the partition-level FI.
struct EstimateTable {
  std::vector<std::string> block_names;
  std::vector<double> eps_blocks;
  std::vector<std::size_t> block_sizes;
  double eps_D = 0.0;
  std::size_t d = 0;
  double fi = 0.0;
};
EstimateTable make_table(const FragilityEstimate& estimate, const Partition& partition);
std::string render_table(const EstimateTable& table);

/// "path value" lines for every leaf of a JSON report; numbers to 9 decimals.
std::string render_flat(const Json& report);
std::string format_number(double v);

/// Parses argv and runs; writes the report to `out` unless --out is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace blockfi::app
