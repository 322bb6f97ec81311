#include "hdod/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hdod/error.hpp"

namespace hdod {

namespace {

// (1 - alpha) * m is formed in floating point; this absorbs rounding so that
// e.g. (1 - 0.7) * 300 selects the 90th order statistic rather than the 91st.
constexpr double kRankSlack = 1e-9;

bool all_equal(const Eigen::VectorXd& v) {
  return v.size() == 0 || v.maxCoeff() == v.minCoeff();
}

std::vector<std::size_t> exceedances(const Eigen::VectorXd& t, double threshold) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (t(i) > threshold) out.push_back(static_cast<std::size_t>(i));
  return out;
}

}  // namespace

std::string_view to_string(RotationMode mode) {
  return mode == RotationMode::Pooled ? "pooled" : "fwer";
}

void validate(const ClusteringConfig& cfg) {
  if (!(cfg.alpha_max > 0.0 && cfg.alpha_max < 0.5))
    throw Error(ErrorCode::InvalidConfig, "clustering alpha must lie in (0, 0.5)");
  if (!(cfg.gap_threshold_coeff > 0.0) || !std::isfinite(cfg.gap_threshold_coeff))
    throw Error(ErrorCode::InvalidConfig, "gap threshold coefficient must be positive");
}

void validate(const RotationConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw Error(ErrorCode::InvalidConfig, "rotation alpha must lie in (0, 1)");
  if (cfg.rotations < 1) throw Error(ErrorCode::InvalidConfig, "rotation count B must be >= 1");
}

std::optional<TwoClusterSplit> split_1d_two_clusters(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return std::nullopt;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  if (*lo_it == *hi_it) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> sorted(n);
  for (std::size_t k = 0; k < n; ++k) sorted[k] = values[order[k]];

  auto sse = [&](std::size_t begin, std::size_t end) {
    double mean = 0.0;
    for (std::size_t k = begin; k < end; ++k) mean += sorted[k];
    mean /= static_cast<double>(end - begin);
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) s += (sorted[k] - mean) * (sorted[k] - mean);
    return s;
  };

  std::size_t best_split = 1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s < n; ++s) {
    const double objective = sse(0, s) + sse(s, n);
    if (objective <= best) {
      best = objective;
      best_split = s;
    }
  }

  TwoClusterSplit out;
  out.labels.assign(n, 0);
  double low_sum = 0.0;
  double high_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k >= best_split) {
      out.labels[order[k]] = 1;
      high_sum += sorted[k];
    } else {
      low_sum += sorted[k];
    }
  }
  out.high_size = n - best_split;
  out.low_mean = low_sum / static_cast<double>(best_split);
  out.high_mean = high_sum / static_cast<double>(out.high_size);
  return out;
}

double upper_quantile(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidConfig, "quantile of an empty sample");
  const double m = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * m - kRankSlack * m));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

Eigen::MatrixXd haar_orthogonal(int n, Rng& rng) {
  Eigen::MatrixXd z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = rng.normal();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

NullDistribution build_null(const DataMatrix& data, const RotationConfig& cfg) {
  validate(cfg);
  const auto n = static_cast<int>(data.n());
  NullDistribution null;
  null.mode = cfg.mode;
  null.samples.reserve(cfg.mode == RotationMode::Pooled
                           ? static_cast<std::size_t>(n) * static_cast<std::size_t>(cfg.rotations)
                           : static_cast<std::size_t>(cfg.rotations));
  for (int b = 1; b <= cfg.rotations; ++b) {
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(b)}));
    const Eigen::MatrixXd h = haar_orthogonal(n, rng);
    RowMatrix rotated = h * data.values();
    const ScoreVector t = outlyingness_scores(DataMatrix::from_raw(std::move(rotated)), cfg.kind);
    if (cfg.mode == RotationMode::Pooled) {
      null.samples.insert(null.samples.end(), t.values.begin(), t.values.end());
    } else {
      null.samples.push_back(t.values.maxCoeff());
    }
  }
  std::sort(null.samples.begin(), null.samples.end());
  null.critical_value = upper_quantile(null.samples, cfg.alpha);
  return null;
}

DetectionResult detect_clustering(const DataMatrix& data, const ClusteringConfig& cfg) {
  validate(cfg);
  ScoreVector scores = outlyingness_scores(data, cfg.kind);
  const auto n = static_cast<std::size_t>(data.n());

  ClusteringDiagnostics diag;
  diag.threshold = cfg.gap_threshold_coeff * scores.scale_hint;
  diag.max_outliers =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.alpha_max + kRankSlack));

  std::vector<std::size_t> flagged;
  const auto split = split_1d_two_clusters(
      std::span<const double>(scores.values.data(), static_cast<std::size_t>(scores.values.size())));
  if (!split) {
    diag.degenerate = true;
    diag.inlier_cluster_size = n;
  } else {
    double min_out = std::numeric_limits<double>::infinity();
    double max_in = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double t = scores.values(static_cast<Eigen::Index>(i));
      if (split->labels[i] == 1) {
        min_out = std::min(min_out, t);
      } else {
        max_in = std::max(max_in, t);
      }
    }
    diag.gap = min_out - max_in;
    diag.outlier_cluster_size = split->high_size;
    diag.inlier_cluster_size = n - split->high_size;
    if (diag.outlier_cluster_size <= diag.max_outliers && diag.gap > diag.threshold) {
      for (std::size_t i = 0; i < n; ++i)
        if (split->labels[i] == 1) flagged.push_back(i);
    }
  }
  return {std::move(flagged), std::move(scores), diag, cfg};
}

DetectionResult detect_rotation(const DataMatrix& data, const RotationConfig& cfg) {
  validate(cfg);
  ScoreVector scores = outlyingness_scores(data, cfg.kind);
  const NullDistribution null = build_null(data, cfg);

  RotationDiagnostics diag;
  diag.critical_value = null.critical_value;
  diag.null_size = null.samples.size();

  std::vector<std::size_t> flagged;
  if (!all_equal(scores.values)) flagged = exceedances(scores.values, null.critical_value);
  return {std::move(flagged), std::move(scores), diag, cfg};
}

DetectionResult detect_rotation_pooled(const DataMatrix& data, const RotationConfig& cfg) {
  if (cfg.mode != RotationMode::Pooled)
    throw Error(ErrorCode::InvalidConfig, "pooled rotation test requires mode = pooled");
  return detect_rotation(data, cfg);
}

DetectionResult detect_rotation_fwer(const DataMatrix& data, const RotationConfig& cfg) {
  if (cfg.mode != RotationMode::FWER)
    throw Error(ErrorCode::InvalidConfig, "FWER rotation test requires mode = fwer");
  return detect_rotation(data, cfg);
}

}  // namespace hdod
