#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edaqa/signal.hpp"

namespace edaqa {

using Labels = Eigen::VectorXi;

inline constexpr int kClean = 0;
inline constexpr int kNoisy = 1;

/// Design matrix with binary labels (Clean=0, Noisy=1), a subject id per
/// row, and a stable row id used by the leakage audit.
struct Dataset {
  Mat X;
  Labels y;
  std::vector<std::string> groups;
  std::vector<std::int64_t> row_ids;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }

  /// Throws RejectedInput when shapes disagree or labels are not 0/1.
  void check() const;

  Dataset subset(const std::vector<Eigen::Index>& rows) const;
  Dataset with_columns(const std::vector<int>& cols) const;

  /// Sorted distinct subject ids.
  std::vector<std::string> distinct_groups() const;
  bool has_both_classes() const;
};

/// Per-feature z-score fitted on training rows only. Columns whose
/// population sigma is below 1e-12 map to 0.
struct StandardizerParams {
  Vec mean;
  Vec stddev;
};

StandardizerParams standardize_fit(const Mat& train);
Mat standardize_apply(const StandardizerParams& params, const Mat& X);

/// Group k-fold assignment: sorted distinct groups are dealt round-robin to
/// min(k, #groups) folds. Returns the fold id of every row.
std::vector<int> group_kfold(const std::vector<std::string>& groups, int k, int* n_folds = nullptr);

}  // namespace edaqa
