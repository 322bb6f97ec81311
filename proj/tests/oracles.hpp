#pragma once

// Brute-force reference implementations. These deliberately follow the
// textbook definitions with plain nested loops and full sorts, sharing no code
// with the library kernels they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat distances(const Mat& x) {
  const std::size_t n = x.size();
  Mat d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x[i].size(); ++k) s += (x[i][k] - x[j][k]) * (x[i][k] - x[j][k]);
      d[i][j] = std::sqrt(s);
    }
  return d;
}

inline Mat gram(const Mat& x) {
  const std::size_t n = x.size();
  Mat g(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < x[i].size(); ++k) g[i][j] += x[i][k] * x[j][k];
  return g;
}

inline Mat delta(const Mat& m) {
  const std::size_t n = m.size();
  Mat out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        s += (m[i][k] - m[j][k]) * (m[i][k] - m[j][k]);
      }
      out[i][j] = std::sqrt(s);
    }
  return out;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : (v[m / 2 - 1] + v[m / 2]) / 2.0;
}

inline std::vector<double> colwise_median(const Mat& d) {
  std::vector<double> med;
  for (std::size_t j = 0; j < d.size(); ++j) {
    std::vector<double> col;
    for (std::size_t i = 0; i < d.size(); ++i) col.push_back(d[i][j]);
    med.push_back(median(col));
  }
  return med;
}

inline std::vector<double> scores(const Mat& d) {
  const auto med = colwise_median(d);
  std::vector<double> t;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) s += (d[i][j] - med[j]) * (d[i][j] - med[j]);
    t.push_back(std::sqrt(s));
  }
  return t;
}

/// Exhaustive 1D two-cluster search over all sorted split points. Returns the
/// size of the optimal low cluster; ties prefer the larger low cluster.
inline std::size_t best_split(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto sse = [&](std::size_t b, std::size_t e) {
    double mean = 0.0;
    for (std::size_t k = b; k < e; ++k) mean += v[k];
    mean /= static_cast<double>(e - b);
    double s = 0.0;
    for (std::size_t k = b; k < e; ++k) s += (v[k] - mean) * (v[k] - mean);
    return s;
  };
  std::size_t best = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s < v.size(); ++s) {
    const double obj = sse(0, s) + sse(s, v.size());
    if (obj < best_obj || obj == best_obj) {
      best_obj = obj;
      best = s;
    }
  }
  return best;
}

/// k-th order statistic with k = ceil((1 - alpha) m) via a full sort.
inline double upper_quantile(std::vector<double> v, double alpha) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  std::size_t k = 0;
  while (static_cast<double>(k) < (1.0 - alpha) * static_cast<double>(m) - 1e-9 * m) ++k;
  if (k == 0) k = 1;
  return v[k - 1];
}

}  // namespace oracle
