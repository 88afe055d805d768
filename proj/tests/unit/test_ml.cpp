#include <doctest.h>

#include <random>
#include <map>
#include <set>

#include "edaqa/error.hpp"
#include "edaqa/knn.hpp"
#include "edaqa/model_selection.hpp"
#include "edaqa/parallel.hpp"
#include "edaqa/ttest.hpp"
#include "oracles.hpp"

using namespace edaqa;

namespace {

// Two Gaussian clouds, one per class, `sep` apart along every informative
// column; remaining columns are noise.
Dataset clouds(int n, int informative, int noise, double sep, std::uint64_t seed, int subjects = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Dataset ds;
  ds.X.resize(n, informative + noise);
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const int cls = i % 2;
    ds.y(i) = cls;
    for (int j = 0; j < informative + noise; ++j) ds.X(i, j) = g(rng) + (j < informative && cls ? sep : 0.0);
    ds.groups.push_back("S" + std::to_string(10 + (i / 2) % subjects));
    ds.row_ids.push_back(i);
  }
  return ds;
}

Dataset xor_clusters(int per_cluster, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.15);
  Dataset ds;
  const double cx[] = {-1, 1, -1, 1}, cy[] = {-1, 1, 1, -1};
  ds.X.resize(4 * per_cluster, 2);
  ds.y.resize(4 * per_cluster);
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < per_cluster; ++i) {
      const int r = c * per_cluster + i;
      ds.X(r, 0) = cx[c] + g(rng);
      ds.X(r, 1) = cy[c] + g(rng);
      ds.y(r) = c < 2 ? kNoisy : kClean;
      ds.groups.push_back("S01");
      ds.row_ids.push_back(r);
    }
  }
  return ds;
}

double accuracy(const Labels& a, const Labels& b) { return (a.array() == b.array()).cast<double>().mean(); }

void check_dual(const Mat& K, const Labels& y, const SvmParams& p) {
  const DualSolution s = smo_solve(K, y, p);
  CHECK(s.converged);
  CHECK((s.alpha.array() >= 0.0).all());
  CHECK((s.alpha.array() <= p.C).all());
  CHECK(kkt_gap(K, y, s.alpha, p.C) <= p.tol);
  // equality constraint sum alpha_i y_i = 0
  CHECK(std::abs(s.alpha.dot(s.signs)) <= 1e-8 * std::max(1.0, s.alpha.sum()));
}

}  // namespace

TEST_CASE("standardizer examples") {
  Mat train(3, 2);
  train << 1, 5, 2, 5, 3, 5;
  const auto p = standardize_fit(train);
  const Mat z = standardize_apply(p, train);
  CHECK(z(0, 0) == doctest::Approx(-1.224744871391589));
  CHECK(z(1, 0) == doctest::Approx(0.0));
  CHECK(z(2, 0) == doctest::Approx(1.224744871391589));
  CHECK(z.col(1).isZero(0));

  const Dataset ds = clouds(200, 5, 5, 1.0, 3);
  const Mat zz = standardize_apply(standardize_fit(ds.X), ds.X);
  for (int j = 0; j < zz.cols(); ++j) {
    const auto col = oracle::to_std(zz.col(j));
    CHECK(std::abs(oracle::mean(col)) <= 1e-9);
    CHECK(std::abs(oracle::pvar(col) - 1.0) <= 1e-9);
  }
}

TEST_CASE("SVM dual feasibility and KKT on varied problems") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Dataset ds = clouds(120, 3, 4, 0.8 + 0.3 * static_cast<double>(seed), seed);
    const Mat Z = standardize_apply(standardize_fit(ds.X), ds.X);
    for (double C : {1.0, 10.0, 1000.0}) {
      for (double gamma : {0.01, 1.0}) {
        SvmParams p;
        p.C = C;
        p.gamma = gamma;
        check_dual(kernel_matrix(Z, Z, p), ds.y, p);
      }
    }
  }
}

TEST_CASE("SVM separable clouds reach 100% training accuracy") {
  const Dataset ds = clouds(100, 2, 0, 8.0, 4);
  SvmParams p;
  p.C = 10;
  p.gamma = 0.1;
  const SVMModel m = svm_train(ds.X, ds.y, p);
  CHECK(m.converged);
  CHECK(accuracy(svm_predict(m, ds.X), ds.y) == 1.0);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(svm_predict_one(m, ds.X.row(i)) == ds.y(i));
}

TEST_CASE("XOR separable by RBF but not by a linear kernel") {
  const Dataset ds = xor_clusters(25, 5);
  SvmParams rbf;
  rbf.C = 10;
  rbf.gamma = 1.0;
  CHECK(accuracy(svm_predict(svm_train(ds.X, ds.y, rbf), ds.X), ds.y) == 1.0);
  for (double C : {0.1, 1.0, 10.0, 1000.0}) {
    SvmParams lin;
    lin.kernel = Kernel::Linear;
    lin.C = C;
    const SVMModel m = svm_train(ds.X, ds.y, lin);
    check_dual(kernel_matrix(ds.X, ds.X, lin), ds.y, lin);
    CHECK(accuracy(svm_predict(m, ds.X), ds.y) <= 0.75);
  }
  // brute force: no line through the plane gets more than 3 of the 4 clusters right
  int best = 0;
  for (int a = 0; a < 360; ++a) {
    const double th = a * M_PI / 180;
    for (double b = -2; b <= 2; b += 0.05) {
      int good = 0;
      const double cx[] = {-1, 1, -1, 1}, cy[] = {-1, 1, 1, -1};
      for (int c = 0; c < 4; ++c) good += ((std::cos(th) * cx[c] + std::sin(th) * cy[c] + b >= 0) == (c < 2)) ? 1 : 0;
      best = std::max(best, good);
    }
  }
  CHECK(best == 3);
}

TEST_CASE("SVM duplicate point with opposite labels stays in the box") {
  Mat X(2, 1);
  X << 0.5, 0.5;
  Labels y(2);
  y << kClean, kNoisy;
  SvmParams p;
  p.C = 3.0;
  const DualSolution s = smo_solve(kernel_matrix(X, X, p), y, p);
  CHECK((s.alpha.array() >= 0).all());
  CHECK((s.alpha.array() <= 3.0).all());
}

TEST_CASE("KNN matches an exhaustive scan on 1000 queries") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 10);
  Mat X(60, 1);
  Labels y(60);
  for (int i = 0; i < 60; ++i) {
    X(i, 0) = std::round(u(rng) * 4) / 4;  // coarse grid forces distance ties
    y(i) = X(i, 0) > 5 ? (i % 7 == 0 ? kClean : kNoisy) : (i % 5 == 0 ? kNoisy : kClean);
  }
  for (int q = 0; q < 1000; ++q) {
    const double x = u(rng);
    const int k = 1 + q % 9;
    std::vector<std::pair<double, int>> d;
    for (int i = 0; i < 60; ++i) d.emplace_back(std::abs(X(i, 0) - x), i);
    std::sort(d.begin(), d.end());
    int noisy = 0;
    for (int i = 0; i < k; ++i) noisy += y(d[static_cast<std::size_t>(i)].second);
    const int expect = 2 * noisy >= k ? kNoisy : kClean;
    Eigen::RowVectorXd row(1);
    row << x;
    CHECK(knn_predict_one(X, y, row, k) == expect);
  }
}

TEST_CASE("KNN examples and errors") {
  Mat X(2, 1);
  X << 0.0, 2.0;
  Labels y(2);
  y << kClean, kNoisy;
  Eigen::RowVectorXd at(1), mid(1);
  at << 0.0;
  mid << 1.0;
  CHECK(knn_predict_one(X, y, at, 1) == kClean);
  CHECK(knn_predict_one(X, y, mid, 2) == kNoisy);
  CHECK_THROWS_AS(knn_predict_one(Mat(0, 1), Labels(0), at, 1), RejectedInput);
  CHECK_THROWS_AS(knn_predict_one(X, y, at, 3), RejectedInput);

  const Dataset ds = clouds(80, 3, 3, 1.0, 12);
  CHECK(accuracy(knn_predict(ds.X, ds.y, ds.X, 1), ds.y) == 1.0);
}

TEST_CASE("random forest importance, purity and determinism") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  Dataset ds;
  ds.X.resize(500, 10);
  ds.y.resize(500);
  for (int i = 0; i < 500; ++i) {
    for (int j = 0; j < 10; ++j) ds.X(i, j) = g(rng);
    ds.y(i) = ds.X(i, 7) > 0 ? kNoisy : kClean;
    ds.groups.push_back("S01");
    ds.row_ids.push_back(i);
  }
  ForestParams p;
  p.n_trees = 100;
  p.seed = 99;
  const RFModel m = rf_train(ds, p);
  Eigen::Index top;
  m.importance.maxCoeff(&top);
  CHECK(top == 7);
  CHECK((m.importance.array() >= 0).all());
  CHECK(m.importance.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(accuracy(rf_predict(m, ds.X), ds.y) == 1.0);
  CHECK(m.max_features == 3);

  set_worker_count(4);
  const RFModel m4 = rf_train(ds, p);
  set_worker_count(1);
  CHECK((m.importance.array() == m4.importance.array()).all());
  REQUIRE(m.trees.size() == m4.trees.size());
  for (std::size_t t = 0; t < m.trees.size(); ++t) {
    CHECK(m.trees[t].feature == m4.trees[t].feature);
    CHECK(m.trees[t].threshold == m4.trees[t].threshold);
  }
  p.seed = 100;
  CHECK_FALSE((rf_train(ds, p).importance.array() == m.importance.array()).all());
}

TEST_CASE("random forest never-used feature has zero importance") {
  Dataset ds = clouds(200, 2, 2, 3.0, 14);
  ds.X.col(3).setConstant(1.0);
  ForestParams p;
  p.n_trees = 50;
  CHECK(rf_train(ds, p).importance(3) == 0.0);
}

TEST_CASE("random forest single class predicts that class") {
  Dataset ds = clouds(20, 2, 0, 1.0, 15);
  ds.y.setConstant(kNoisy);
  ForestParams p;
  p.n_trees = 5;
  const RFModel m = rf_train(ds, p);
  CHECK(m.single_class);
  CHECK((rf_predict(m, ds.X).array() == kNoisy).all());
}

TEST_CASE("group k-fold keeps subjects whole") {
  std::vector<std::string> g;
  for (int i = 0; i < 90; ++i) g.push_back("S" + std::to_string(i % 9));
  int nf = 0;
  const auto fold = group_kfold(g, 5, &nf);
  CHECK(nf == 5);
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto [it, fresh] = seen.emplace(g[i], fold[i]);
    CHECK(it->second == fold[i]);
  }
  std::vector<std::string> three{"a", "b", "c", "a"};
  group_kfold(three, 5, &nf);
  CHECK(nf == 3);
}

TEST_CASE("SVM grid is 16 points in tie-break order") {
  const PipelineConfig cfg;
  const auto grid = make_grid(cfg);
  REQUIRE(grid.size() == 16);
  const double Cs[] = {1, 10, 100, 1000}, gs[] = {0.001, 0.01, 0.1, 1};
  for (int i = 0; i < 16; ++i) {
    CHECK(grid[static_cast<std::size_t>(i)].C == Cs[i / 4]);
    CHECK(grid[static_cast<std::size_t>(i)].gamma == gs[i % 4]);
  }
}

TEST_CASE("grid search picks the exhaustive argmax") {
  // tight, interleaved clusters reward a large gamma
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0, 0.05);
  Dataset ds;
  const int n = 240;
  ds.X.resize(n, 2);
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const int c = i % 8;
    ds.X(i, 0) = (c % 4) + g(rng);
    ds.X(i, 1) = (c / 4) + g(rng);
    ds.y(i) = (c % 4 + c / 4) % 2;
    ds.groups.push_back("S" + std::to_string(i % 6));
    ds.row_ids.push_back(i);
  }
  PipelineConfig cfg;
  const auto grid = make_grid(cfg);
  const std::vector<int> cols{0, 1};
  const GridResult r = grid_search(ds, grid, ClassifierKind::Svm, cols, cfg, 1);
  CHECK(r.evaluated.size() == 16);
  double best = -1;
  HyperParams arg;
  for (const auto& hp : grid) {
    const double s = cv_accuracy(ds, ClassifierKind::Svm, hp, cols, cfg, 1);
    if (s > best + 1e-12) {
      best = s;
      arg = hp;
    }
  }
  CHECK(r.best == arg);
  CHECK(r.best_score == doctest::Approx(best).epsilon(1e-12));
  CHECK(r.best.gamma >= 0.1);

  const GridResult one = grid_search(ds, {grid[5]}, ClassifierKind::Svm, cols, cfg, 1);
  CHECK(one.best == grid[5]);
}

TEST_CASE("feature selection recovers informative columns") {
  int hits = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const Dataset ds = clouds(300, 3, 49, 1.5, 700 + trial, 10);
    PipelineConfig cfg;
    const SelectionResult s = select_features(ds, cfg, trial);
    const std::set<int> chosen(s.features.begin(), s.features.end());
    hits += chosen.count(0) && chosen.count(1) && chosen.count(2) ? 1 : 0;
  }
  CHECK(hits >= 19);

  const Dataset ds = clouds(200, 3, 49, 1.5, 800, 6);
  PipelineConfig all;
  all.k_grid = {52};
  CHECK(select_features(ds, all, 1).features.size() == 52);
  PipelineConfig cfg;
  CHECK(select_features(ds, cfg, 5).features == select_features(ds, cfg, 5).features);
}

TEST_CASE("LOSO protocol, aggregates and leakage audit") {
  const Dataset ds = clouds(400, 3, 49, 1.2, 900, 8);
  PipelineConfig cfg;
  cfg.seed = 3;
  cfg.rf_trees = 50;
  cfg.selection_trees = 30;
  for (ClassifierKind k : {ClassifierKind::Svm, ClassifierKind::RandomForest, ClassifierKind::Knn}) {
    cfg.kind = k;
    const EvalReport rep = loso_evaluate(ds, cfg);
    CHECK(rep.folds.size() == 8);
    CHECK(audit_leakage(rep, ds).empty());
    std::vector<double> acc;
    int total = 0;
    for (const auto& f : rep.folds) {
      acc.push_back(f.accuracy);
      total += f.n_test;
      CHECK(f.accuracy == doctest::Approx(f.counts.accuracy()));
      CHECK(f.n_test == f.counts.total());
      for (std::int64_t id : f.test_rows) {
        CHECK(std::find(f.audit.standardizer.begin(), f.audit.standardizer.end(), id) == f.audit.standardizer.end());
      }
    }
    CHECK(total == 400);
    CHECK(std::abs(rep.mean_accuracy - oracle::mean(acc)) <= 1e-12);
    CHECK(std::abs(rep.std_accuracy - std::sqrt(oracle::pvar(acc))) <= 1e-12);
    if (k == ClassifierKind::Svm) {
      for (const auto& f : rep.folds) CHECK(f.grid_points == 16);
    }
  }
}

TEST_CASE("leakage audit catches a contaminated fold") {
  const Dataset ds = clouds(120, 2, 2, 2.0, 901, 4);
  PipelineConfig cfg;
  cfg.selection = false;
  EvalReport rep = loso_evaluate(ds, cfg);
  REQUIRE(audit_leakage(rep, ds).empty());
  rep.folds[0].audit.grid_search.push_back(rep.folds[0].test_rows.front());
  CHECK_FALSE(audit_leakage(rep, ds).empty());
}

TEST_CASE("LOSO is identical across worker counts") {
  const Dataset ds = clouds(200, 3, 10, 1.0, 902, 5);
  PipelineConfig cfg;
  cfg.kind = ClassifierKind::RandomForest;
  cfg.rf_trees = 40;
  cfg.selection_trees = 20;
  set_worker_count(1);
  const EvalReport a = loso_evaluate(ds, cfg);
  set_worker_count(3);
  const EvalReport b = loso_evaluate(ds, cfg);
  set_worker_count(1);
  for (std::size_t i = 0; i < a.folds.size(); ++i) {
    CHECK(a.folds[i].accuracy == b.folds[i].accuracy);
    CHECK(a.folds[i].selected == b.folds[i].selected);
  }
}

TEST_CASE("standardized predictions ignore affine column rescaling") {
  const Dataset ds = clouds(160, 3, 3, 1.5, 903, 4);
  Dataset scaled = ds;
  scaled.X.col(1) = scaled.X.col(1) * 250.0 + Vec::Constant(ds.rows(), 17.0);
  PipelineConfig cfg;
  HyperParams hp;
  const std::vector<int> cols{0, 1, 2, 3, 4, 5};
  for (ClassifierKind k : {ClassifierKind::Svm, ClassifierKind::Knn}) {
    const TrainedClassifier a = fit_classifier(ds, k, hp, cols, cfg, 1);
    const TrainedClassifier b = fit_classifier(scaled, k, hp, cols, cfg, 1);
    CHECK((a.predict(ds.X).array() == b.predict(scaled.X).array()).all());
  }
}

TEST_CASE("Welch t-test against direct formulas") {
  Vec a(5), b(5);
  a << 1, 2, 3, 4, 5;
  b << 2, 3, 4, 5, 6;
  const WelchResult w = welch_t_test(a, b);
  const oracle::Welch o = oracle::welch(oracle::to_std(a), oracle::to_std(b));
  CHECK(std::abs(w.t - o.t) <= 1e-9);
  CHECK(std::abs(w.df - o.df) <= 1e-9);
  CHECK(std::abs(w.p - o.p) <= 1e-9);

  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int na = 5 + trial % 40, nb = 3 + (trial * 7) % 50;
    std::vector<double> x(static_cast<std::size_t>(na)), y(static_cast<std::size_t>(nb));
    for (auto& v : x) v = g(rng) * 2.0;
    for (auto& v : y) v = g(rng) + 0.3 * (trial % 5);
    const WelchResult r = welch_t_test(oracle::to_eigen(x), oracle::to_eigen(y));
    const oracle::Welch ow = oracle::welch(x, y);
    CHECK(std::abs(r.t - ow.t) <= 1e-9 * std::max(1.0, std::abs(ow.t)));
    CHECK(std::abs(r.df - ow.df) <= 1e-9 * ow.df);
    CHECK(std::abs(r.p - ow.p) <= 1e-9);
  }
}

TEST_CASE("Welch t-test examples") {
  const Vec s = Vec::LinSpaced(10, 0, 1);
  const WelchResult same = welch_t_test(s, s);
  CHECK(same.t == 0.0);
  CHECK(same.p == doctest::Approx(1.0));
  const WelchResult flat = welch_t_test(Vec::Constant(4, 2.0), Vec::Constant(6, 2.0));
  CHECK(flat.t == 0.0);
  CHECK(flat.p == 1.0);

  std::mt19937_64 rng(32);
  std::normal_distribution<double> g;
  Vec a(100), b(100);
  for (int i = 0; i < 100; ++i) {
    a(i) = g(rng);
    b(i) = 5 + g(rng);
  }
  CHECK(welch_t_test(a, b).p < 1e-10);
  CHECK_THROWS_AS(welch_t_test(Vec::Zero(1), s), RejectedInput);
}

TEST_CASE("confusion arithmetic") {
  Labels t(6), p(6);
  t << 1, 1, 0, 0, 0, 1;
  p << 1, 0, 0, 1, 0, 1;
  const Confusion c = confusion(t, p);
  CHECK(c.tp == 2);
  CHECK(c.fn == 1);
  CHECK(c.tn == 2);
  CHECK(c.fp == 1);
  CHECK(c.accuracy() == doctest::Approx(4.0 / 6.0));
  CHECK(c.balanced_accuracy() == doctest::Approx(2.0 / 3.0));
}
