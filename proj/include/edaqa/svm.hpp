#pragma once

#include "edaqa/dataset.hpp"

namespace edaqa {

enum class Kernel { Rbf, Linear };

struct SvmParams {
  double C = 1.0;
  double gamma = 0.1;
  Kernel kernel = Kernel::Rbf;
  double tol = 1e-3;
  long max_iter = 0;  // 0 -> max(10^7, 100 n)
};

/// Solution of the C-SVC dual over all training points.
struct DualSolution {
  Vec alpha;     // one per training row, in [0, C]
  Vec signs;     // +1 Noisy, -1 Clean
  double rho = 0.0;  // decision = sum alpha_i y_i K(x_i, x) - rho
  long iterations = 0;
  double gap = 0.0;  // maximal KKT violation at exit
  bool converged = false;
};

struct SVMModel {
  Mat support_vectors;
  Vec dual_coef;  // alpha_i * y_i
  double bias = 0.0;
  SvmParams params;
  bool converged = true;
  long iterations = 0;
};

/// Squared Euclidean distance matrix between the rows of A and B.
Mat squared_distances(const Mat& A, const Mat& B);

/// Kernel matrix between the rows of A and B.
Mat kernel_matrix(const Mat& A, const Mat& B, const SvmParams& params);

/// SMO with second-order working-set selection over a precomputed kernel.
/// Exits when the maximal violating pair gap, recomputed from a fresh
/// gradient, is <= tol, or at max_iter with converged = false.
DualSolution smo_solve(const Mat& K, const Labels& y, const SvmParams& params);

/// Maximal violating pair gap m(alpha) - M(alpha) recomputed from scratch.
double kkt_gap(const Mat& K, const Labels& y, const Vec& alpha, double C);

SVMModel svm_train(const Mat& X, const Labels& y, const SvmParams& params);
/// Same, reusing a precomputed kernel matrix of X.
SVMModel svm_train_with_kernel(const Mat& X, const Labels& y, const Mat& K, const SvmParams& params);

double svm_decision(const SVMModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);
/// decision >= 0 -> Noisy.
int svm_predict_one(const SVMModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);
Labels svm_predict(const SVMModel& model, const Mat& X);

}  // namespace edaqa
