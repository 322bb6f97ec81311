#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace hdod {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class StatisticKind { DOD, DOG };
enum class PairwiseKind { Distance, Gram };

std::string_view to_string(StatisticKind kind);
StatisticKind parse_statistic_kind(std::string_view text);

/// n x p observations-by-features matrix. Every entry is finite and n >= 3.
class DataMatrix {
 public:
  /// Validates and wraps an uncentered matrix.
  /// Throws Error{NonFinite} or Error{TooFewRows}.
  static DataMatrix from_raw(RowMatrix values);

  const RowMatrix& values() const noexcept { return values_; }
  Eigen::Index n() const noexcept { return values_.rows(); }
  Eigen::Index p() const noexcept { return values_.cols(); }
  bool centered() const noexcept { return centered_; }

 private:
  friend DataMatrix center_columns(const RowMatrix& raw);
  DataMatrix(RowMatrix values, bool centered) : values_(std::move(values)), centered_(centered) {}

  RowMatrix values_;
  bool centered_ = false;
};

struct PairwiseMatrix {
  Eigen::MatrixXd values;
  PairwiseKind kind;
};

struct DeltaMatrix {
  Eigen::MatrixXd values;
  StatisticKind kind;
};

struct ScoreVector {
  Eigen::VectorXd values;
  StatisticKind kind;
  /// sqrt(p n) for DOD, p sqrt(n) for DOG.
  double scale_hint;
};

/// Subtracts each column's arithmetic mean. Row order is preserved.
DataMatrix center_columns(const RowMatrix& raw);
DataMatrix center_columns(const DataMatrix& data);

PairwiseMatrix pairwise_distances(const DataMatrix& data);
PairwiseMatrix gram_matrix(const DataMatrix& data);

/// Distance between rows i and j of `pm`, skipping columns i and j.
/// Throws Error{TooFewRows} when n < 3.
DeltaMatrix delta_matrix(const PairwiseMatrix& pm);

/// Median of each column, diagonal zero included. Even counts use the
/// midpoint of the two central order statistics.
Eigen::VectorXd colwise_median(const DeltaMatrix& delta);

/// t_i = || delta.row(i) - colwise_median(delta) ||, summed over all n columns.
ScoreVector outlyingness_scores(const DataMatrix& data, StatisticKind kind);

double scale_hint(StatisticKind kind, Eigen::Index n, Eigen::Index p);

}  // namespace hdod
