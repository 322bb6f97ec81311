#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "hdod/rng.hpp"
#include "hdod/stats_core.hpp"

namespace hdod {

/// Gap-validated two-cluster detection on the outlyingness scores.
struct ClusteringConfig {
  double alpha_max = 0.3;             // largest admissible outlier fraction, in (0, 0.5)
  double gap_threshold_coeff = 0.1;   // c = coeff * scale_hint
  StatisticKind kind = StatisticKind::DOD;
};

enum class RotationMode { Pooled, FWER };

std::string_view to_string(RotationMode mode);

struct RotationConfig {
  double alpha = 0.05;  // quantile level of the null; in (0, 1)
  int rotations = 300;  // B
  std::uint64_t seed = 0;
  StatisticKind kind = StatisticKind::DOD;
  RotationMode mode = RotationMode::Pooled;
};

/// Throw Error{InvalidConfig} on out-of-range parameters.
void validate(const ClusteringConfig& cfg);
void validate(const RotationConfig& cfg);

struct NullDistribution {
  std::vector<double> samples;  // ascending; n*B (Pooled) or B (FWER) entries
  RotationMode mode;
  double critical_value;
};

struct ClusteringDiagnostics {
  double gap = 0.0;        // min over C_out minus max over C_in; 0 when degenerate
  double threshold = 0.0;  // c
  std::size_t inlier_cluster_size = 0;
  std::size_t outlier_cluster_size = 0;
  std::size_t max_outliers = 0;  // floor(n * alpha_max)
  bool degenerate = false;       // every score equal
};

struct RotationDiagnostics {
  double critical_value = 0.0;
  std::size_t null_size = 0;
};

struct DetectionResult {
  std::vector<std::size_t> flagged;  // 0-based, ascending
  ScoreVector scores;
  std::variant<ClusteringDiagnostics, RotationDiagnostics> diagnostics;
  std::variant<ClusteringConfig, RotationConfig> config;
};

struct TwoClusterSplit {
  std::vector<int> labels;  // 1 marks the high cluster
  double low_mean = 0.0;
  double high_mean = 0.0;
  std::size_t high_size = 0;
};

/// Exact 1D two-means: the optimal partition is contiguous in sorted order,
/// so every split point is scored and the one with least within-cluster sum of
/// squares wins. Ties go to the split with the smaller high cluster.
/// Returns nullopt when fewer than two values or all values are equal.
std::optional<TwoClusterSplit> split_1d_two_clusters(std::span<const double> values);

/// The k-th smallest of `sorted` with k = ceil((1 - alpha) m), clamped to [1, m].
double upper_quantile(std::span<const double> sorted, double alpha);

/// Haar-distributed element of O(n): QR of a Gaussian matrix with the columns
/// of Q sign-corrected by diag(R).
Eigen::MatrixXd haar_orthogonal(int n, Rng& rng);

/// Rotation b (1-based) uses the stream derive_seed(cfg.seed, {b}); the
/// resulting samples do not depend on evaluation order.
NullDistribution build_null(const DataMatrix& data, const RotationConfig& cfg);

DetectionResult detect_clustering(const DataMatrix& data, const ClusteringConfig& cfg);

/// Require cfg.mode == Pooled / FWER respectively.
DetectionResult detect_rotation_pooled(const DataMatrix& data, const RotationConfig& cfg);
DetectionResult detect_rotation_fwer(const DataMatrix& data, const RotationConfig& cfg);

/// Dispatches on cfg.mode.
DetectionResult detect_rotation(const DataMatrix& data, const RotationConfig& cfg);

}  // namespace hdod
