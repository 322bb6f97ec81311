#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hdod/datagen.hpp"
#include "hdod/detection.hpp"

namespace hdod {

enum class MethodId { DOD1, DOD2, DOD3, DOG1, DOG2, DOG3 };

inline constexpr MethodId kAllMethods[] = {MethodId::DOD1, MethodId::DOD2, MethodId::DOD3,
                                           MethodId::DOG1, MethodId::DOG2, MethodId::DOG3};

std::string_view to_string(MethodId id);
MethodId parse_method_id(std::string_view text);
StatisticKind statistic_of(MethodId id);

/// 1 = clustering, 2 = pooled rotation, 3 = FWER rotation.
int family_of(MethodId id);

using MethodConfig = std::variant<ClusteringConfig, RotationConfig>;

struct MethodSpec {
  MethodId id;
  MethodConfig config;
};

/// Tuning used in the simulation study: clustering alpha 0.3 with c = 0.1
/// times the scale hint; pooled alpha 0.05; FWER alpha 0.7; B = 300.
MethodSpec default_method(MethodId id, int rotations = 300);

/// Throws Error{InvalidConfig} when the config type or statistic does not match the id.
void validate(const MethodSpec& spec);

/// Runs one detector. `seed` replaces the rotation seed; ignored for clustering.
DetectionResult run_method(const DataMatrix& data, const MethodSpec& spec, std::uint64_t seed);

struct ReplicateOutcome {
  int true_positives = 0;
  int false_positives = 0;
  int n_out = 0;
  int n_in = 0;
};

ReplicateOutcome classify(std::span<const std::size_t> flagged,
                          std::span<const std::size_t> truth, int n);

struct SummaryRow {
  SimScenario scenario;
  MethodId method = MethodId::DOD1;
  std::optional<double> tpr;  // empty when n_out == 0
  double fpr = 0.0;
  double fwfp = 0.0;
  int replicates = 0;
  double wall_seconds = 0.0;
  std::string error;  // non-empty when the cell aborted
  std::vector<ReplicateOutcome> outcomes;
};

/// TPR = mean(tp / n_out), FPR = mean(fp / n_in), FWFP = share of replicates with fp >= 1.
/// Throws Error{EmptyOutcomes} on an empty list and Error{InvalidCounts} on
/// inconsistent counts.
SummaryRow metrics(std::span<const ReplicateOutcome> outcomes);

struct BenchSummary {
  std::vector<SummaryRow> rows;
};

struct PopulationConstants {
  double mu_in_sq = 0.0;
  double mu_out_sq = 0.0;
  double sigma_in_sq = 0.0;
  double sigma_out_sq = 0.0;
  double delta_sq = 0.0;
};

/// Constants implied by the generators at the scenario's p: inliers have zero
/// mean and unit marginal variance; outliers have mu_O^2 = p^{2 s_mu - 1},
/// sigma_O^2 = s_sigma and delta^2 = mu_O^2.
PopulationConstants population_constants(const SimScenario& scn);

struct LemmaConstants {
  double alpha_d, beta_d, alpha_g, beta_g;
};

LemmaConstants lemma_constants(const PopulationConstants& pop);

struct MarginConstants {
  double gamma_d, gamma_g;
};

/// gamma = sqrt((n - n_out - 1) alpha^2 + (n_out - 1) beta^2) for each statistic.
/// Throws Error{InvalidCounts} unless 0 < n_out < n / 2.
MarginConstants theoretical_gamma(const PopulationConstants& pop, int n, int n_out);

struct MarginProbe {
  std::vector<double> gaps;  // one per replicate, scaled by the statistic's scale hint
  double q10 = 0.0;
  double median = 0.0;
  double q90 = 0.0;
  double gamma = 0.0;  // theoretical limit for the probed statistic
};

/// Scaled min-outlier minus max-inlier score over R replicates of `scn`
/// (replicate r uses seed derive_seed(scn.seed, {r})). Scores are computed on
/// the raw draws, the population the closed-form constants describe.
MarginProbe margin_probe(const SimScenario& scn, int replicates, StatisticKind kind);

struct GridOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// R seeded replicates per (scenario, method) cell. Replicate r of a scenario
/// draws its dataset from derive_seed(seed, {scenario_key, r}) so that all
/// methods see the same data; rotations use derive_seed(seed, {scenario_key,
/// method, r}). scn.seed is ignored.
BenchSummary run_grid(std::span<const SimScenario> scenarios, std::span<const MethodSpec> methods,
                      int replicates, std::uint64_t seed, const GridOptions& options = {});

std::uint64_t scenario_key(const SimScenario& scn);

void write_summary_csv(std::ostream& os, const BenchSummary& summary, bool include_timing);
void write_summary_text(std::ostream& os, const BenchSummary& summary);
void write_outcomes_jsonl(std::ostream& os, const BenchSummary& summary);

}  // namespace hdod
