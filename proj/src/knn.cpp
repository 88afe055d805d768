#include "edaqa/knn.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace edaqa {

int knn_predict_one(const Mat& train_X, const Labels& train_y, const Eigen::Ref<const Eigen::RowVectorXd>& x, int k) {
  const Eigen::Index n = train_X.rows();
  if (n == 0) throw RejectedInput("knn_predict: empty training set");
  if (k < 1 || k > n) throw RejectedInput("knn_predict: k must lie in [1, n_train]");
  if (x.size() != train_X.cols()) throw RejectedInput("knn_predict: feature count mismatch");
  const Vec d = (train_X.rowwise() - x).rowwise().squaredNorm();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  const auto kk = static_cast<std::ptrdiff_t>(k);
  std::partial_sort(idx.begin(), idx.begin() + kk, idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return d(a) < d(b) || (d(a) == d(b) && a < b);
  });
  int noisy = 0;
  for (std::ptrdiff_t i = 0; i < kk; ++i) noisy += train_y(idx[static_cast<std::size_t>(i)]) == kNoisy ? 1 : 0;
  return 2 * noisy >= k ? kNoisy : kClean;
}

Labels knn_predict(const Mat& train_X, const Labels& train_y, const Mat& X, int k) {
  Labels out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = knn_predict_one(train_X, train_y, X.row(i), k);
  return out;
}

}  // namespace edaqa
