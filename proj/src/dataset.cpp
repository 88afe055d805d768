#include "edaqa/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace edaqa {

void Dataset::check() const {
  if (y.size() != X.rows() || static_cast<Eigen::Index>(groups.size()) != X.rows() ||
      static_cast<Eigen::Index>(row_ids.size()) != X.rows()) {
    throw RejectedInput("Dataset: X, y, groups and row_ids must have one entry per row");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != kClean && y(i) != kNoisy) throw RejectedInput("Dataset: labels must be 0 (clean) or 1 (noisy)");
  }
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  out.groups.reserve(rows.size());
  out.row_ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
    out.y(static_cast<Eigen::Index>(i)) = y(r);
    out.groups.push_back(groups[static_cast<std::size_t>(r)]);
    out.row_ids.push_back(row_ids[static_cast<std::size_t>(r)]);
  }
  return out;
}

Dataset Dataset::with_columns(const std::vector<int>& cols) const {
  Dataset out;
  out.X.resize(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= X.cols()) throw RejectedInput("Dataset::with_columns: column out of range");
    out.X.col(static_cast<Eigen::Index>(j)) = X.col(cols[j]);
  }
  out.y = y;
  out.groups = groups;
  out.row_ids = row_ids;
  return out;
}

std::vector<std::string> Dataset::distinct_groups() const {
  std::set<std::string> s(groups.begin(), groups.end());
  return {s.begin(), s.end()};
}

bool Dataset::has_both_classes() const {
  return y.size() > 0 && (y.array() == kClean).any() && (y.array() == kNoisy).any();
}

StandardizerParams standardize_fit(const Mat& train) {
  StandardizerParams p;
  if (train.rows() == 0) throw RejectedInput("standardize_fit: no training rows");
  p.mean = train.colwise().mean().transpose();
  p.stddev = ((train.rowwise() - p.mean.transpose()).array().square().colwise().mean()).sqrt().transpose();
  return p;
}

Mat standardize_apply(const StandardizerParams& params, const Mat& X) {
  if (X.cols() != params.mean.size()) throw RejectedInput("standardize_apply: column count mismatch");
  Mat out(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (params.stddev(j) < 1e-12) {
      out.col(j).setZero();
    } else {
      out.col(j) = (X.col(j).array() - params.mean(j)) / params.stddev(j);
    }
  }
  return out;
}

std::vector<int> group_kfold(const std::vector<std::string>& groups, int k, int* n_folds) {
  const std::set<std::string> distinct(groups.begin(), groups.end());
  const int folds = std::max(1, std::min<int>(k, static_cast<int>(distinct.size())));
  std::map<std::string, int> fold_of;
  int i = 0;
  for (const auto& g : distinct) fold_of[g] = (i++) % folds;
  std::vector<int> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(fold_of[g]);
  if (n_folds) *n_folds = folds;
  return out;
}

}  // namespace edaqa
