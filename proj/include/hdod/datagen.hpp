#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hdod/rng.hpp"
#include "hdod/stats_core.hpp"

namespace hdod {

/// Inlier covariance structure.
///   ID: identity.
///   AR: [Sigma]_{jk} = 0.7^{|j-k|}.
///   MA: normalized moving average of length floor(sqrt(p)) with U(0,1) weights.
enum class Structure { ID, AR, MA };

std::string_view to_string(Structure s);
Structure parse_structure(std::string_view text);

inline constexpr double kArCoefficient = 0.7;

struct SimScenario {
  int n = 30;
  int p = 500;
  int n_out = 3;
  Structure structure = Structure::ID;
  double s_mu = 0.5;
  double s_sigma = 1.0;
  std::uint64_t seed = 0;
};

/// Throws Error{InvalidScenario} unless n >= 3, p >= 1, 0 <= 2 n_out < n and s_sigma > 0.
void validate(const SimScenario& scn);

struct LabeledDataset {
  DataMatrix data;                         // raw draws, not centered
  std::vector<std::size_t> outlier_indices;  // 0-based, ascending
};

RowMatrix gen_inliers_id(int count, int p, Rng& rng);

/// Stationary AR(1) recursion per row: x_1 = z_1, x_j = 0.7 x_{j-1} + sqrt(0.51) z_j.
RowMatrix gen_inliers_ar(int count, int p, Rng& rng);

struct MaBlock {
  RowMatrix rows;
  std::vector<double> eta;  // shared weights, length floor(sqrt(p))
};

/// One eta vector is drawn and shared by every row; each row has its own
/// length p + L - 1 innovation stream.
MaBlock gen_inliers_ma(int count, int p, Rng& rng);

struct OutlierBlock {
  RowMatrix rows;
  Eigen::VectorXd mean;  // p^{s_mu} u / ||u||, shared by every row
};

/// Rows ~ N(mean, s_sigma I_p); `s_sigma` is a variance.
OutlierBlock gen_outliers(int count, int p, double s_mu, double s_sigma, Rng& rng);

LabeledDataset make_dataset(const SimScenario& scn);

}  // namespace hdod
