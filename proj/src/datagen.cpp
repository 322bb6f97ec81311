#include "hdod/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hdod/error.hpp"

namespace hdod {

namespace {

// Stream tags for make_dataset.
constexpr std::uint64_t kPositionStream = 1;
constexpr std::uint64_t kInlierStream = 2;
constexpr std::uint64_t kOutlierStream = 3;

int ma_window(int p) {
  int l = static_cast<int>(std::sqrt(static_cast<double>(p)));
  while (static_cast<long>(l + 1) * (l + 1) <= p) ++l;
  while (static_cast<long>(l) * l > p) --l;
  return std::max(l, 1);
}

}  // namespace

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::ID: return "id";
    case Structure::AR: return "ar";
    case Structure::MA: return "ma";
  }
  return "?";
}

Structure parse_structure(std::string_view text) {
  if (text == "id" || text == "ID") return Structure::ID;
  if (text == "ar" || text == "AR") return Structure::AR;
  if (text == "ma" || text == "MA") return Structure::MA;
  throw Error(ErrorCode::InvalidConfig, "unknown structure '" + std::string(text) + "'");
}

void validate(const SimScenario& scn) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidScenario, msg); };
  if (scn.n < 3) fail("n must be at least 3");
  if (scn.p < 1) fail("p must be at least 1");
  if (scn.n_out < 0) fail("n_out must be nonnegative");
  if (2 * scn.n_out >= scn.n) fail("n_out must be less than n/2");
  if (!(scn.s_sigma > 0.0) || !std::isfinite(scn.s_sigma)) fail("s_sigma must be positive");
  if (!std::isfinite(scn.s_mu)) fail("s_mu must be finite");
}

RowMatrix gen_inliers_id(int count, int p, Rng& rng) {
  RowMatrix rows(count, p);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < p; ++j) rows(i, j) = rng.normal();
  return rows;
}

RowMatrix gen_inliers_ar(int count, int p, Rng& rng) {
  const double innovation_sd = std::sqrt(1.0 - kArCoefficient * kArCoefficient);
  RowMatrix rows(count, p);
  for (int i = 0; i < count; ++i) {
    if (p == 0) continue;
    rows(i, 0) = rng.normal();
    for (int j = 1; j < p; ++j)
      rows(i, j) = kArCoefficient * rows(i, j - 1) + innovation_sd * rng.normal();
  }
  return rows;
}

MaBlock gen_inliers_ma(int count, int p, Rng& rng) {
  const int window = ma_window(p);
  MaBlock block;
  block.eta.resize(static_cast<std::size_t>(window));
  for (double& e : block.eta) e = rng.uniform_open();
  const double norm = std::sqrt(std::inner_product(block.eta.begin(), block.eta.end(),
                                                   block.eta.begin(), 0.0));

  block.rows.resize(count, p);
  std::vector<double> z(static_cast<std::size_t>(p + window - 1));
  for (int i = 0; i < count; ++i) {
    for (double& v : z) v = rng.normal();
    for (int j = 0; j < p; ++j) {
      double acc = 0.0;
      for (int l = 0; l < window; ++l) acc += block.eta[l] * z[j + l];
      block.rows(i, j) = acc / norm;
    }
  }
  return block;
}

OutlierBlock gen_outliers(int count, int p, double s_mu, double s_sigma, Rng& rng) {
  OutlierBlock block;
  Eigen::VectorXd u(p);
  for (int j = 0; j < p; ++j) u(j) = rng.uniform_open();
  block.mean = std::pow(static_cast<double>(p), s_mu) * u / u.norm();

  const double sd = std::sqrt(s_sigma);
  block.rows.resize(count, p);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < p; ++j) block.rows(i, j) = block.mean(j) + sd * rng.normal();
  return block;
}

LabeledDataset make_dataset(const SimScenario& scn) {
  validate(scn);

  // Partial Fisher-Yates over 0..n-1 picks the outlier rows.
  Rng pos_rng(derive_seed(scn.seed, {kPositionStream}));
  std::vector<std::size_t> order(static_cast<std::size_t>(scn.n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int k = 0; k < scn.n_out; ++k) {
    const auto pick = k + pos_rng.below(static_cast<std::uint64_t>(scn.n - k));
    std::swap(order[k], order[pick]);
  }
  std::vector<std::size_t> outliers(order.begin(), order.begin() + scn.n_out);
  std::sort(outliers.begin(), outliers.end());

  const int n_in = scn.n - scn.n_out;
  Rng in_rng(derive_seed(scn.seed, {kInlierStream}));
  RowMatrix inliers;
  switch (scn.structure) {
    case Structure::ID: inliers = gen_inliers_id(n_in, scn.p, in_rng); break;
    case Structure::AR: inliers = gen_inliers_ar(n_in, scn.p, in_rng); break;
    case Structure::MA: inliers = gen_inliers_ma(n_in, scn.p, in_rng).rows; break;
  }

  Rng out_rng(derive_seed(scn.seed, {kOutlierStream}));
  const OutlierBlock out = gen_outliers(scn.n_out, scn.p, scn.s_mu, scn.s_sigma, out_rng);

  RowMatrix x(scn.n, scn.p);
  Eigen::Index next_in = 0;
  Eigen::Index next_out = 0;
  for (int i = 0; i < scn.n; ++i) {
    const bool is_out = next_out < scn.n_out &&
                        outliers[static_cast<std::size_t>(next_out)] == static_cast<std::size_t>(i);
    if (is_out) {
      x.row(i) = out.rows.row(next_out++);
    } else {
      x.row(i) = inliers.row(next_in++);
    }
  }
  return {DataMatrix::from_raw(std::move(x)), std::move(outliers)};
}

}  // namespace hdod
