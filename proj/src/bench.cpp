#include "hdod/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "hdod/error.hpp"
#include "hdod/format.hpp"

namespace hdod {

namespace {

double sample_quantile(std::vector<double> sorted, double level) {
  // Linear interpolation between order statistics (type 7).
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) return 0.0;
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  if (m == 0) return 0.0;
  return m % 2 == 1 ? values[m / 2] : (values[m / 2 - 1] + values[m / 2]) / 2.0;
}

std::uint64_t method_tag(MethodId id) { return static_cast<std::uint64_t>(id) + 1; }

// Runs body(r) for r in [0, count) on up to `threads` workers. Each index is
// handled exactly once; callers write into per-index slots.
template <typename Body>
void parallel_for(int count, unsigned threads, Body body) {
  if (threads <= 1 || count <= 1) {
    for (int r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> workers;
  const unsigned used = std::min<unsigned>(threads, static_cast<unsigned>(count));
  workers.reserve(used);
  for (unsigned w = 0; w < used; ++w) {
    workers.emplace_back([&] {
      for (int r = next++; r < count; r = next++) body(r);
    });
  }
}

}  // namespace

std::string_view to_string(MethodId id) {
  switch (id) {
    case MethodId::DOD1: return "dod1";
    case MethodId::DOD2: return "dod2";
    case MethodId::DOD3: return "dod3";
    case MethodId::DOG1: return "dog1";
    case MethodId::DOG2: return "dog2";
    case MethodId::DOG3: return "dog3";
  }
  return "?";
}

MethodId parse_method_id(std::string_view text) {
  for (MethodId id : kAllMethods) {
    const std::string_view name = to_string(id);
    if (text.size() == name.size() &&
        std::equal(text.begin(), text.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == b;
        }))
      return id;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown method '" + std::string(text) + "'");
}

StatisticKind statistic_of(MethodId id) {
  switch (id) {
    case MethodId::DOD1:
    case MethodId::DOD2:
    case MethodId::DOD3: return StatisticKind::DOD;
    default: return StatisticKind::DOG;
  }
}

int family_of(MethodId id) {
  switch (id) {
    case MethodId::DOD1:
    case MethodId::DOG1: return 1;
    case MethodId::DOD2:
    case MethodId::DOG2: return 2;
    default: return 3;
  }
}

MethodSpec default_method(MethodId id, int rotations) {
  const StatisticKind kind = statistic_of(id);
  switch (family_of(id)) {
    case 1: return {id, ClusteringConfig{0.3, 0.1, kind}};
    case 2: return {id, RotationConfig{0.05, rotations, 0, kind, RotationMode::Pooled}};
    default: return {id, RotationConfig{0.7, rotations, 0, kind, RotationMode::FWER}};
  }
}

void validate(const MethodSpec& spec) {
  const int family = family_of(spec.id);
  const StatisticKind kind = statistic_of(spec.id);
  const std::string name(to_string(spec.id));
  if (family == 1) {
    const auto* cfg = std::get_if<ClusteringConfig>(&spec.config);
    if (!cfg) throw Error(ErrorCode::InvalidConfig, name + " requires a clustering config");
    if (cfg->kind != kind)
      throw Error(ErrorCode::InvalidConfig, name + " does not use statistic " +
                                                std::string(to_string(cfg->kind)));
    validate(*cfg);
    return;
  }
  const auto* cfg = std::get_if<RotationConfig>(&spec.config);
  if (!cfg) throw Error(ErrorCode::InvalidConfig, name + " requires a rotation config");
  if (cfg->kind != kind)
    throw Error(ErrorCode::InvalidConfig, name + " does not use statistic " +
                                              std::string(to_string(cfg->kind)));
  const RotationMode mode = family == 2 ? RotationMode::Pooled : RotationMode::FWER;
  if (cfg->mode != mode)
    throw Error(ErrorCode::InvalidConfig, name + " requires rotation mode " +
                                              std::string(to_string(mode)));
  validate(*cfg);
}

DetectionResult run_method(const DataMatrix& data, const MethodSpec& spec, std::uint64_t seed) {
  validate(spec);
  if (const auto* cfg = std::get_if<ClusteringConfig>(&spec.config))
    return detect_clustering(data, *cfg);
  RotationConfig cfg = std::get<RotationConfig>(spec.config);
  cfg.seed = seed;
  return detect_rotation(data, cfg);
}

ReplicateOutcome classify(std::span<const std::size_t> flagged,
                          std::span<const std::size_t> truth, int n) {
  ReplicateOutcome out;
  out.n_out = static_cast<int>(truth.size());
  out.n_in = n - out.n_out;
  for (std::size_t i : flagged) {
    if (std::find(truth.begin(), truth.end(), i) != truth.end()) {
      ++out.true_positives;
    } else {
      ++out.false_positives;
    }
  }
  return out;
}

SummaryRow metrics(std::span<const ReplicateOutcome> outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::EmptyOutcomes, "no replicate outcomes");
  const int n_out = outcomes.front().n_out;
  const int n_in = outcomes.front().n_in;
  for (const auto& o : outcomes) {
    if (o.n_out != n_out || o.n_in != n_in || o.n_in <= 0 || o.true_positives < 0 ||
        o.false_positives < 0 || o.true_positives > o.n_out || o.false_positives > o.n_in)
      throw Error(ErrorCode::InvalidCounts, "inconsistent replicate outcome counts");
  }
  double tpr_sum = 0.0;
  double fpr_sum = 0.0;
  int with_fp = 0;
  for (const auto& o : outcomes) {
    if (n_out > 0) tpr_sum += static_cast<double>(o.true_positives) / n_out;
    fpr_sum += static_cast<double>(o.false_positives) / n_in;
    if (o.false_positives >= 1) ++with_fp;
  }
  const double r = static_cast<double>(outcomes.size());
  SummaryRow row;
  if (n_out > 0) row.tpr = tpr_sum / r;
  row.fpr = fpr_sum / r;
  row.fwfp = with_fp / r;
  row.replicates = static_cast<int>(outcomes.size());
  row.outcomes.assign(outcomes.begin(), outcomes.end());
  return row;
}

PopulationConstants population_constants(const SimScenario& scn) {
  PopulationConstants pop;
  pop.mu_in_sq = 0.0;
  pop.sigma_in_sq = 1.0;
  pop.mu_out_sq = std::pow(static_cast<double>(scn.p), 2.0 * scn.s_mu - 1.0);
  pop.sigma_out_sq = scn.s_sigma;
  pop.delta_sq = pop.mu_out_sq;
  return pop;
}

LemmaConstants lemma_constants(const PopulationConstants& pop) {
  const double sigma_in = std::sqrt(pop.sigma_in_sq);
  const double sigma_out = std::sqrt(pop.sigma_out_sq);
  const double mixed = std::sqrt(pop.sigma_in_sq + pop.sigma_out_sq + pop.delta_sq);
  LemmaConstants c{};
  c.alpha_d = std::sqrt(2.0) * sigma_in - mixed;
  c.beta_d = mixed - std::sqrt(2.0) * sigma_out;
  c.alpha_g = (pop.mu_in_sq - pop.mu_out_sq + pop.delta_sq) / 2.0;
  c.beta_g = (pop.mu_in_sq - pop.mu_out_sq - pop.delta_sq) / 2.0;
  return c;
}

MarginConstants theoretical_gamma(const PopulationConstants& pop, int n, int n_out) {
  if (n_out <= 0 || 2 * n_out >= n)
    throw Error(ErrorCode::InvalidCounts, "margin constants need 0 < n_out < n/2");
  const LemmaConstants c = lemma_constants(pop);
  const double w_in = n - n_out - 1;
  const double w_out = n_out - 1;
  return {std::sqrt(w_in * c.alpha_d * c.alpha_d + w_out * c.beta_d * c.beta_d),
          std::sqrt(w_in * c.alpha_g * c.alpha_g + w_out * c.beta_g * c.beta_g)};
}

MarginProbe margin_probe(const SimScenario& scn, int replicates, StatisticKind kind) {
  if (scn.n_out < 1) throw Error(ErrorCode::InvalidCounts, "margin probe needs n_out >= 1");
  if (replicates < 1) throw Error(ErrorCode::InvalidConfig, "margin probe needs R >= 1");
  validate(scn);
  const MarginConstants gamma = theoretical_gamma(population_constants(scn), scn.n, scn.n_out);

  MarginProbe probe;
  probe.gamma = kind == StatisticKind::DOD ? gamma.gamma_d : gamma.gamma_g;
  probe.gaps.reserve(static_cast<std::size_t>(replicates));
  for (int r = 0; r < replicates; ++r) {
    SimScenario rep = scn;
    rep.seed = derive_seed(scn.seed, {static_cast<std::uint64_t>(r)});
    const LabeledDataset ds = make_dataset(rep);
    const ScoreVector t = outlyingness_scores(ds.data, kind);
    double min_out = std::numeric_limits<double>::infinity();
    double max_in = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < t.values.size(); ++i) {
      const bool is_out = std::binary_search(ds.outlier_indices.begin(), ds.outlier_indices.end(),
                                             static_cast<std::size_t>(i));
      const double scaled = t.values(i) / t.scale_hint;
      if (is_out) {
        min_out = std::min(min_out, scaled);
      } else {
        max_in = std::max(max_in, scaled);
      }
    }
    probe.gaps.push_back(min_out - max_in);
  }
  probe.q10 = sample_quantile(probe.gaps, 0.1);
  probe.median = median_of(probe.gaps);
  probe.q90 = sample_quantile(probe.gaps, 0.9);
  return probe;
}

std::uint64_t scenario_key(const SimScenario& scn) {
  return derive_seed(0, {static_cast<std::uint64_t>(scn.structure) + 1,
                         static_cast<std::uint64_t>(scn.n), static_cast<std::uint64_t>(scn.p),
                         static_cast<std::uint64_t>(scn.n_out),
                         std::bit_cast<std::uint64_t>(scn.s_mu),
                         std::bit_cast<std::uint64_t>(scn.s_sigma)});
}

BenchSummary run_grid(std::span<const SimScenario> scenarios, std::span<const MethodSpec> methods,
                      int replicates, std::uint64_t seed, const GridOptions& options) {
  if (scenarios.empty() || methods.empty())
    throw Error(ErrorCode::InvalidConfig, "bench grid needs at least one scenario and method");
  if (replicates < 1) throw Error(ErrorCode::InvalidConfig, "replicate count must be >= 1");
  for (const auto& scn : scenarios) validate(scn);
  for (const auto& m : methods) validate(m);
  const unsigned threads =
      options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());

  BenchSummary summary;
  for (const SimScenario& scn : scenarios) {
    const std::uint64_t key = scenario_key(scn);
    for (const MethodSpec& method : methods) {
      const auto start = std::chrono::steady_clock::now();
      std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(replicates));
      std::vector<std::string> errors(static_cast<std::size_t>(replicates));
      parallel_for(replicates, threads, [&](int r) {
        const auto slot = static_cast<std::size_t>(r);
        try {
          SimScenario rep = scn;
          rep.seed = derive_seed(seed, {key, static_cast<std::uint64_t>(r)});
          const LabeledDataset ds = make_dataset(rep);
          const DataMatrix x = center_columns(ds.data);
          const std::uint64_t rot_seed =
              derive_seed(seed, {key, method_tag(method.id), static_cast<std::uint64_t>(r)});
          const DetectionResult res = run_method(x, method, rot_seed);
          outcomes[slot] = classify(res.flagged, ds.outlier_indices, scn.n);
        } catch (const std::exception& e) {
          errors[slot] = e.what();
        }
      });
      const auto first_error =
          std::find_if(errors.begin(), errors.end(), [](const std::string& s) { return !s.empty(); });

      SummaryRow row;
      if (first_error != errors.end()) {
        row.error = "replicate " + std::to_string(first_error - errors.begin()) + ": " + *first_error;
      } else {
        row = metrics(outcomes);
      }
      row.scenario = scn;
      row.scenario.seed = seed;
      row.method = method.id;
      row.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      summary.rows.push_back(std::move(row));
    }
  }
  return summary;
}

void write_summary_csv(std::ostream& os, const BenchSummary& summary, bool include_timing) {
  os << "structure,n,p,n_out,s_mu,s_sigma,method,replicates,tpr,fpr,fwfp";
  if (include_timing) os << ",wall_seconds";
  os << ",error\n";
  for (const auto& row : summary.rows) {
    const auto& s = row.scenario;
    os << to_string(s.structure) << ',' << s.n << ',' << s.p << ',' << s.n_out << ','
       << format_double(s.s_mu) << ',' << format_double(s.s_sigma) << ',' << to_string(row.method)
       << ',' << row.replicates << ',' << (row.tpr ? format_double(*row.tpr) : "NA") << ','
       << format_double(row.fpr) << ',' << format_double(row.fwfp);
    if (include_timing) os << ',' << format_fixed(row.wall_seconds, 3);
    os << ',' << row.error << '\n';
  }
}

void write_summary_text(std::ostream& os, const BenchSummary& summary) {
  os << std::left << std::setw(10) << "structure" << std::setw(14) << "(s_mu,s_sig)"
     << std::setw(7) << "n_out" << std::setw(8) << "method" << std::right << std::setw(8) << "TPR"
     << std::setw(8) << "FPR" << std::setw(8) << "FWFP" << std::setw(6) << "R" << std::setw(10)
     << "time[s]" << '\n';
  for (const auto& row : summary.rows) {
    const auto& s = row.scenario;
    const std::string shape = "(" + format_fixed(s.s_mu, 2) + "," + format_fixed(s.s_sigma, 2) + ")";
    os << std::left << std::setw(10) << to_string(s.structure) << std::setw(14) << shape
       << std::setw(7) << s.n_out << std::setw(8) << to_string(row.method) << std::right;
    if (!row.error.empty()) {
      os << "  error: " << row.error << '\n';
      continue;
    }
    os << std::setw(8) << (row.tpr ? format_fixed(*row.tpr, 3) : "n/a") << std::setw(8)
       << format_fixed(row.fpr, 3) << std::setw(8) << format_fixed(row.fwfp, 3) << std::setw(6)
       << row.replicates << std::setw(10) << format_fixed(row.wall_seconds, 2) << '\n';
  }
}

void write_outcomes_jsonl(std::ostream& os, const BenchSummary& summary) {
  for (const auto& row : summary.rows) {
    for (std::size_t r = 0; r < row.outcomes.size(); ++r) {
      const auto& o = row.outcomes[r];
      nlohmann::ordered_json line;
      line["structure"] = to_string(row.scenario.structure);
      line["n"] = row.scenario.n;
      line["p"] = row.scenario.p;
      line["n_out"] = row.scenario.n_out;
      line["s_mu"] = row.scenario.s_mu;
      line["s_sigma"] = row.scenario.s_sigma;
      line["method"] = to_string(row.method);
      line["replicate"] = r;
      line["true_positives"] = o.true_positives;
      line["false_positives"] = o.false_positives;
      line["n_out_total"] = o.n_out;
      line["n_in_total"] = o.n_in;
      os << line.dump() << '\n';
    }
  }
}

}  // namespace hdod
