// Command-line front end: score, detect, simulate, bench.
//
// Exit status: 0 when the command ran (with or without flagged outliers),
// 2 on usage or input errors.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "hdod/cli_io.hpp"
#include "hdod/error.hpp"

namespace {

constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
  using hdod::Command;
  using hdod::RunConfig;

  CLI::App app{"Relational outlyingness statistics and outlier detection for high-dimensional data"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string kind;
  std::string method;
  std::string structure = "id";
  bool no_center = false;
  double alpha = 0.0;
  double coeff = 0.0;
  int rotations = 0;

  const std::map<std::string, std::string> kinds{{"dod", "dod"}, {"dog", "dog"}};

  auto* score = app.add_subcommand("score", "Print per-observation outlyingness scores");
  score->add_option("--input", cfg.input, "CSV file, rows are observations")->required()->check(CLI::ExistingFile);
  score->add_option("--kind", kind, "Statistic: dod or dog")->check(CLI::IsMember({"dod", "dog"}));
  score->add_option("--out", cfg.output, "Write the score CSV here instead of stdout");
  score->add_flag("--no-center", no_center, "Do not center columns");

  auto* detect = app.add_subcommand("detect", "Run one detection procedure and write JSON");
  detect->add_option("--input", cfg.input, "CSV file, rows are observations")->required()->check(CLI::ExistingFile);
  detect->add_option("--method", method, "dod1, dod2, dod3, dog1, dog2 or dog3")->required();
  detect->add_option("--kind", kind, "Statistic; must agree with the method");
  auto* alpha_opt = detect->add_option("--alpha", alpha, "Outlier fraction (clustering) or null quantile level");
  auto* rot_opt = detect->add_option("--B", rotations, "Number of random rotations");
  auto* coeff_opt = detect->add_option("--coeff", coeff, "Gap threshold coefficient (clustering)");
  detect->add_option("--seed", cfg.seed, "Rotation seed")->required();
  detect->add_option("--out", cfg.output, "Output JSON path")->required();
  detect->add_flag("--no-center", no_center, "Do not center columns");

  auto* simulate = app.add_subcommand("simulate", "Generate a labeled synthetic dataset");
  simulate->add_option("--structure", structure, "id, ar or ma");
  simulate->add_option("--n", cfg.scenario.n, "Sample size");
  simulate->add_option("--p", cfg.scenario.p, "Dimension");
  simulate->add_option("--nout", cfg.scenario.n_out, "Number of outliers");
  simulate->add_option("--smu", cfg.scenario.s_mu, "Mean-shift exponent");
  simulate->add_option("--ssigma", cfg.scenario.s_sigma, "Outlier variance");
  auto* sim_seed = simulate->add_option("--seed", cfg.scenario.seed, "Seed");
  simulate->add_option("--scenario", cfg.scenario_file, "Scenario key-value file (replaces the flags above)");
  simulate->add_option("--out", cfg.output, "Output CSV; the sidecar goes next to it")->required();

  auto* bench = app.add_subcommand("bench", "Run a scenario x method simulation grid");
  bench->add_option("--grid", cfg.grid, "Grid key-value file")->required()->check(CLI::ExistingFile);
  bench->add_option("--replicates", cfg.replicates, "Replicates per cell")->check(CLI::PositiveNumber);
  bench->add_option("--seed", cfg.seed, "Root seed")->required();
  bench->add_option("--out", cfg.output, "Summary CSV path")->required();
  bench->add_option("--raw", cfg.raw_output, "Per-replicate outcomes as JSON lines");
  bench->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  bench->add_flag("--timing", cfg.timing, "Add wall-clock seconds to the CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (!kind.empty()) cfg.kind = hdod::parse_statistic_kind(kind);
    if (!method.empty()) cfg.method = hdod::parse_method_id(method);
    if (*alpha_opt) cfg.alpha = alpha;
    if (*coeff_opt) cfg.coeff = coeff;
    if (*rot_opt) cfg.rotations = rotations;
    cfg.center = !no_center;

    if (score->parsed()) {
      cfg.command = Command::Score;
      hdod::cmd_score(cfg, std::cout);
    } else if (detect->parsed()) {
      cfg.command = Command::Detect;
      hdod::cmd_detect(cfg, std::cout);
    } else if (simulate->parsed()) {
      cfg.command = Command::Simulate;
      if (cfg.scenario_file.empty() && !*sim_seed) {
        std::cerr << "simulate: --seed is required\n";
        return kUsageError;
      }
      cfg.scenario.structure = hdod::parse_structure(structure);
      hdod::cmd_simulate(cfg, std::cout);
    } else if (bench->parsed()) {
      cfg.command = Command::Bench;
      hdod::cmd_bench(cfg, std::cout);
    }
  } catch (const hdod::Error& e) {
    std::cerr << "error [" << hdod::to_string(e.code()) << "]: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return 0;
}
