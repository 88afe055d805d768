#pragma once

#include "edaqa/dataset.hpp"

namespace edaqa {

/// Majority class among the k Euclidean nearest training rows. Distance ties
/// are broken by lower row index; vote ties go to Noisy.
int knn_predict_one(const Mat& train_X, const Labels& train_y, const Eigen::Ref<const Eigen::RowVectorXd>& x, int k = 5);
Labels knn_predict(const Mat& train_X, const Labels& train_y, const Mat& X, int k = 5);

}  // namespace edaqa
