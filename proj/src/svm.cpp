#include "edaqa/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace edaqa {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec signs_of(const Labels& y) {
  Vec s(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) s(i) = y(i) == kNoisy ? 1.0 : -1.0;
  return s;
}

bool is_upper(double a, double C) { return a >= C; }
bool is_lower(double a) { return a <= 0.0; }

// Gradient of 0.5 a'Qa - e'a with Q_ij = y_i y_j K_ij.
Vec fresh_gradient(const Mat& K, const Vec& s, const Vec& alpha) {
  const Vec sa = s.cwiseProduct(alpha);
  return s.cwiseProduct(K * sa) - Vec::Ones(alpha.size());
}

double violation_gap(const Vec& G, const Vec& s, const Vec& alpha, double C) {
  double up = -kInf;   // max over I_up of -y G
  double low = kInf;   // min over I_low of -y G
  for (Eigen::Index t = 0; t < alpha.size(); ++t) {
    const double v = -s(t) * G(t);
    const bool in_up = (s(t) > 0 && !is_upper(alpha(t), C)) || (s(t) < 0 && !is_lower(alpha(t)));
    const bool in_low = (s(t) < 0 && !is_upper(alpha(t), C)) || (s(t) > 0 && !is_lower(alpha(t)));
    if (in_up) up = std::max(up, v);
    if (in_low) low = std::min(low, v);
  }
  if (up == -kInf || low == kInf) return 0.0;
  return up - low;
}

}  // namespace

Mat squared_distances(const Mat& A, const Mat& B) {
  const Vec an = A.rowwise().squaredNorm();
  const Vec bn = B.rowwise().squaredNorm();
  Mat D = -2.0 * A * B.transpose();
  D.colwise() += an;
  D.rowwise() += bn.transpose();
  return D.cwiseMax(0.0);
}

Mat kernel_matrix(const Mat& A, const Mat& B, const SvmParams& params) {
  if (params.kernel == Kernel::Linear) return A * B.transpose();
  return (-params.gamma * squared_distances(A, B)).array().exp().matrix();
}

double kkt_gap(const Mat& K, const Labels& y, const Vec& alpha, double C) {
  const Vec s = signs_of(y);
  return violation_gap(fresh_gradient(K, s, alpha), s, alpha, C);
}

DualSolution smo_solve(const Mat& K, const Labels& y, const SvmParams& params) {
  const Eigen::Index n = y.size();
  if (K.rows() != n || K.cols() != n) throw RejectedInput("smo_solve: kernel shape mismatch");
  if (!(params.C > 0.0)) throw RejectedInput("smo_solve: C must be positive");
  const double C = params.C;
  const long max_iter = params.max_iter > 0 ? params.max_iter : std::max<long>(10'000'000L, 100L * n);

  DualSolution sol;
  sol.signs = signs_of(y);
  const Vec& s = sol.signs;
  Vec& alpha = sol.alpha;
  alpha = Vec::Zero(n);
  Vec G = -Vec::Ones(n);
  const Vec QD = K.diagonal();

  long iter = 0;
  for (;;) {
    // Working set: i maximises -y G over I_up, j minimises the second-order
    // objective decrease over I_low.
    double gmax = -kInf, gmax2 = -kInf;
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (s(t) > 0) {
        if (!is_upper(alpha(t), C) && -G(t) >= gmax) { gmax = -G(t); i = t; }
      } else {
        if (!is_lower(alpha(t)) && G(t) >= gmax) { gmax = G(t); i = t; }
      }
    }
    double obj_min = kInf;
    if (i >= 0) {
      for (Eigen::Index t = 0; t < n; ++t) {
        const double qit = s(i) * s(t) * K(i, t);
        if (s(t) > 0) {
          if (is_lower(alpha(t))) continue;
          const double diff = gmax + G(t);
          if (G(t) >= gmax2) gmax2 = G(t);
          if (diff > 0) {
            double a = QD(i) + QD(t) - 2.0 * s(i) * qit;
            if (a <= 0) a = kTau;
            const double obj = -(diff * diff) / a;
            if (obj <= obj_min) { obj_min = obj; j = t; }
          }
        } else {
          if (is_upper(alpha(t), C)) continue;
          const double diff = gmax - G(t);
          if (-G(t) >= gmax2) gmax2 = -G(t);
          if (diff > 0) {
            double a = QD(i) + QD(t) + 2.0 * s(i) * qit;
            if (a <= 0) a = kTau;
            const double obj = -(diff * diff) / a;
            if (obj <= obj_min) { obj_min = obj; j = t; }
          }
        }
      }
    }

    if (i < 0 || j < 0 || gmax + gmax2 < params.tol) {
      // Confirm on a freshly computed gradient before declaring optimality.
      G = fresh_gradient(K, s, alpha);
      sol.gap = violation_gap(G, s, alpha, C);
      if (sol.gap <= params.tol) {
        sol.converged = true;
        break;
      }
      if (iter >= max_iter) break;
      continue;
    }
    if (iter >= max_iter) {
      G = fresh_gradient(K, s, alpha);
      sol.gap = violation_gap(G, s, alpha, C);
      break;
    }
    ++iter;

    const double old_ai = alpha(i), old_aj = alpha(j);
    const double qij = s(i) * s(j) * K(i, j);
    if (s(i) != s(j)) {
      double a = QD(i) + QD(j) + 2.0 * qij;
      if (a <= 0) a = kTau;
      const double delta = (-G(i) - G(j)) / a;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = diff; }
      } else {
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = -diff; }
      }
      if (diff > 0) {
        if (alpha(i) > C) { alpha(i) = C; alpha(j) = C - diff; }
      } else {
        if (alpha(j) > C) { alpha(j) = C; alpha(i) = C + diff; }
      }
    } else {
      double a = QD(i) + QD(j) - 2.0 * qij;
      if (a <= 0) a = kTau;
      const double delta = (G(i) - G(j)) / a;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > C) {
        if (alpha(i) > C) { alpha(i) = C; alpha(j) = sum - C; }
      } else {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = sum; }
      }
      if (sum > C) {
        if (alpha(j) > C) { alpha(j) = C; alpha(i) = sum - C; }
      } else {
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = sum; }
      }
    }
    alpha(i) = std::clamp(alpha(i), 0.0, C);
    alpha(j) = std::clamp(alpha(j), 0.0, C);

    const double dai = alpha(i) - old_ai, daj = alpha(j) - old_aj;
    G.noalias() += (s(i) * dai) * s.cwiseProduct(K.col(i));
    G.noalias() += (s(j) * daj) * s.cwiseProduct(K.col(j));
  }
  sol.iterations = iter;

  double ub = kInf, lb = -kInf, sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = s(t) * G(t);
    if (is_upper(alpha(t), C)) {
      if (s(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (is_lower(alpha(t))) {
      if (s(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  if (n_free > 0) sol.rho = sum_free / n_free;
  else if (std::isfinite(ub) && std::isfinite(lb)) sol.rho = 0.5 * (ub + lb);
  else sol.rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  return sol;
}

SVMModel svm_train_with_kernel(const Mat& X, const Labels& y, const Mat& K, const SvmParams& params) {
  if (X.rows() != y.size()) throw RejectedInput("svm_train: X and y sizes differ");
  const DualSolution sol = smo_solve(K, y, params);
  if (!std::isfinite(sol.rho) || !sol.alpha.allFinite()) throw NumericError("svm_train: non-finite dual solution");
  if (!sol.converged) {
    std::cerr << "warning: svm_train: SMO stopped at max_iter with KKT gap " << sol.gap << "\n";
  }
  SVMModel m;
  m.params = params;
  m.converged = sol.converged;
  m.iterations = sol.iterations;
  m.bias = -sol.rho;
  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < sol.alpha.size(); ++t) {
    if (sol.alpha(t) > 0.0) sv.push_back(t);
  }
  m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
  m.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    m.support_vectors.row(static_cast<Eigen::Index>(k)) = X.row(sv[k]);
    m.dual_coef(static_cast<Eigen::Index>(k)) = sol.alpha(sv[k]) * sol.signs(sv[k]);
  }
  return m;
}

SVMModel svm_train(const Mat& X, const Labels& y, const SvmParams& params) {
  return svm_train_with_kernel(X, y, kernel_matrix(X, X, params), params);
}

double svm_decision(const SVMModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (model.support_vectors.rows() == 0) return model.bias;
  if (x.size() != model.support_vectors.cols()) throw RejectedInput("svm_decision: feature count mismatch");
  const Mat k = kernel_matrix(x, model.support_vectors, model.params);
  return k.row(0).dot(model.dual_coef) + model.bias;
}

int svm_predict_one(const SVMModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  return svm_decision(model, x) >= 0.0 ? kNoisy : kClean;
}

Labels svm_predict(const SVMModel& model, const Mat& X) {
  Labels out(X.rows());
  if (model.support_vectors.rows() == 0) {
    out.setConstant(model.bias >= 0.0 ? kNoisy : kClean);
    return out;
  }
  const Vec f = kernel_matrix(X, model.support_vectors, model.params) * model.dual_coef;
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = f(i) + model.bias >= 0.0 ? kNoisy : kClean;
  return out;
}

}  // namespace edaqa
