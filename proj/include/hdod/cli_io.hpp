#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdod/bench.hpp"
#include "hdod/datagen.hpp"
#include "hdod/detection.hpp"
#include "hdod/stats_core.hpp"

namespace hdod {

inline constexpr int kSchemaVersion = 1;

/// Reads a rectangular numeric CSV (rows are observations). A first line with
/// any non-numeric field is treated as a header. Errors carry 1-based file
/// line and column numbers.
DataMatrix load_csv(const std::filesystem::path& path, bool center);
DataMatrix parse_csv(std::istream& in, bool center);

/// One row per observation, 17 significant digits, no header.
void write_matrix_csv(std::ostream& os, const RowMatrix& values);

/// Flat `key = value` file, one key per line; `#` starts a comment.
/// Duplicate keys are an error.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::istream& in);

void write_scenario_config(std::ostream& os, const SimScenario& scn);
SimScenario scenario_from_config(const KeyValues& kv);

struct BenchGrid {
  std::vector<SimScenario> scenarios;
  std::vector<MethodSpec> methods;
};

/// Keys: structure, n, p, n_out, s_mu, s_sigma (comma lists), methods, and the
/// optional tuning keys rotations, coeff, alpha_clustering, alpha_pooled,
/// alpha_fwer. Scenarios are the product of structure x n x p x n_out x
/// (s_mu, s_sigma) where the two shape lists are zipped pairwise (a single
/// value is broadcast).
BenchGrid grid_from_config(const KeyValues& kv);

enum class Command { Score, Detect, Simulate, Bench };

struct RunConfig {
  Command command = Command::Score;
  std::string input;
  std::string output;
  std::string grid;
  std::string raw_output;
  std::string scenario_file;
  std::optional<StatisticKind> kind;
  std::optional<MethodId> method;
  std::optional<double> alpha;
  std::optional<double> coeff;
  std::optional<int> rotations;
  std::uint64_t seed = 0;
  bool center = true;
  SimScenario scenario;
  int replicates = 100;
  unsigned threads = 0;
  bool timing = false;
};

/// Method defaults with any alpha / B / coeff overrides from `cfg` applied.
/// Throws Error{InvalidConfig} when --kind disagrees with the method.
MethodSpec resolve_method(const RunConfig& cfg);

/// Score CSV goes to cfg.output (or `out` when empty); the bar chart always goes to `out`.
void cmd_score(const RunConfig& cfg, std::ostream& out);
void cmd_detect(const RunConfig& cfg, std::ostream& out);
void cmd_simulate(const RunConfig& cfg, std::ostream& out);
void cmd_bench(const RunConfig& cfg, std::ostream& out);

/// Sidecar written next to a simulated CSV: `data.csv` -> `data.meta.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

}  // namespace hdod
