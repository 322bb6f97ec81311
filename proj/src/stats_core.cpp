#include "hdod/stats_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hdod/error.hpp"

namespace hdod {

namespace {

void require_rows(Eigen::Index n) {
  if (n < 3) {
    throw Error(ErrorCode::TooFewRows,
                "at least 3 observations are required, got " + std::to_string(n));
  }
}

void require_finite(const RowMatrix& values) {
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (!std::isfinite(values(i, j))) {
        throw Error(ErrorCode::NonFinite, "non-finite entry at row " + std::to_string(i + 1) +
                                              ", column " + std::to_string(j + 1));
      }
    }
  }
}

// Sums nonnegative terms in ascending order with long-double accumulation, so
// the result does not depend on the order of observations.
double order_free_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  long double acc = 0.0L;
  for (double v : terms) acc += v;
  return static_cast<double>(acc);
}

}  // namespace

std::string_view to_string(StatisticKind kind) {
  return kind == StatisticKind::DOD ? "dod" : "dog";
}

StatisticKind parse_statistic_kind(std::string_view text) {
  if (text == "dod" || text == "DOD") return StatisticKind::DOD;
  if (text == "dog" || text == "DOG") return StatisticKind::DOG;
  throw Error(ErrorCode::InvalidConfig, "unknown statistic kind '" + std::string(text) + "'");
}

DataMatrix DataMatrix::from_raw(RowMatrix values) {
  require_rows(values.rows());
  require_finite(values);
  return DataMatrix(std::move(values), false);
}

DataMatrix center_columns(const RowMatrix& raw) {
  require_rows(raw.rows());
  require_finite(raw);
  RowMatrix out = raw;
  const auto n = raw.rows();
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    long double sum = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) sum += raw(i, j);
    const double mean = static_cast<double>(sum / n);
    if (mean != 0.0) out.col(j).array() -= mean;
  }
  return DataMatrix(std::move(out), true);
}

DataMatrix center_columns(const DataMatrix& data) {
  if (data.centered()) return data;
  return center_columns(data.values());
}

PairwiseMatrix pairwise_distances(const DataMatrix& data) {
  const RowMatrix& x = data.values();
  const auto n = x.rows();
  const auto p = x.cols();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* xi = x.row(i).data();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double* xj = x.row(j).data();
      long double acc = 0.0L;
      for (Eigen::Index k = 0; k < p; ++k) {
        const double diff = xi[k] - xj[k];
        acc += static_cast<long double>(diff) * diff;
      }
      const double v = static_cast<double>(std::sqrt(acc));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return {std::move(d), PairwiseKind::Distance};
}

PairwiseMatrix gram_matrix(const DataMatrix& data) {
  const RowMatrix& x = data.values();
  const auto n = x.rows();
  const auto p = x.cols();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* xi = x.row(i).data();
    for (Eigen::Index j = i; j < n; ++j) {
      const double* xj = x.row(j).data();
      long double acc = 0.0L;
      for (Eigen::Index k = 0; k < p; ++k) acc += static_cast<long double>(xi[k]) * xj[k];
      const double v = static_cast<double>(acc);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return {std::move(g), PairwiseKind::Gram};
}

DeltaMatrix delta_matrix(const PairwiseMatrix& pm) {
  const Eigen::MatrixXd& m = pm.values;
  const auto n = m.rows();
  require_rows(n);
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n));
  // m is symmetric, so column k of m is row k; columns are contiguous.
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* mi = m.col(i).data();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double* mj = m.col(j).data();
      terms.clear();
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double diff = mi[k] - mj[k];
        terms.push_back(diff * diff);
      }
      const double v = std::sqrt(order_free_sum(terms));
      delta(i, j) = v;
      delta(j, i) = v;
    }
  }
  const auto kind = pm.kind == PairwiseKind::Distance ? StatisticKind::DOD : StatisticKind::DOG;
  return {std::move(delta), kind};
}

Eigen::VectorXd colwise_median(const DeltaMatrix& delta) {
  const auto n = delta.values.rows();
  Eigen::VectorXd med(n);
  std::vector<double> column(static_cast<std::size_t>(n));
  const auto mid = column.begin() + n / 2;
  for (Eigen::Index j = 0; j < n; ++j) {
    std::copy_n(delta.values.col(j).data(), n, column.begin());
    std::nth_element(column.begin(), mid, column.end());
    if (n % 2 == 1) {
      med(j) = *mid;
    } else {
      const double upper = *mid;
      const double lower = *std::max_element(column.begin(), mid);
      med(j) = (lower + upper) / 2.0;
    }
  }
  return med;
}

double scale_hint(StatisticKind kind, Eigen::Index n, Eigen::Index p) {
  const double dn = static_cast<double>(n);
  const double dp = static_cast<double>(p);
  return kind == StatisticKind::DOD ? std::sqrt(dp * dn) : dp * std::sqrt(dn);
}

ScoreVector outlyingness_scores(const DataMatrix& data, StatisticKind kind) {
  const PairwiseMatrix pm =
      kind == StatisticKind::DOD ? pairwise_distances(data) : gram_matrix(data);
  const DeltaMatrix delta = delta_matrix(pm);
  const Eigen::VectorXd med = colwise_median(delta);
  const auto n = delta.values.rows();
  Eigen::VectorXd t(n);
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // delta is symmetric: row i equals column i.
      const double diff = delta.values(j, i) - med(j);
      terms[static_cast<std::size_t>(j)] = diff * diff;
    }
    t(i) = std::sqrt(order_free_sum(terms));
  }
  return {std::move(t), kind, scale_hint(kind, data.n(), data.p())};
}

}  // namespace hdod
