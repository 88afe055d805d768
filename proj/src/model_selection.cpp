#include "edaqa/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <set>

#include "edaqa/knn.hpp"
#include "edaqa/parallel.hpp"

namespace edaqa {

namespace {

std::vector<int> all_columns(Eigen::Index d) {
  std::vector<int> v(static_cast<std::size_t>(d));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

Mat take_columns(const Mat& X, const std::vector<int>& cols) {
  Mat out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = X.col(cols[j]);
  return out;
}

void append_ids(std::vector<std::int64_t>* dst, const Dataset& d) {
  if (dst) dst->insert(dst->end(), d.row_ids.begin(), d.row_ids.end());
}

void normalize_ids(std::vector<std::int64_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool needs_scaling(ClassifierKind k) { return k != ClassifierKind::RandomForest; }

// One group-fold split with pre-standardised matrices and, for the kernel
// and neighbour methods, cached squared distances.
struct Split {
  Dataset train;
  Dataset valid;
  Mat Xtr, Xva;
  Mat Dtr, Dva;  // train x train, valid x train
};

std::vector<Split> make_splits(const Dataset& data, const std::vector<int>& features, const PipelineConfig& cfg,
                               bool scale, bool distances) {
  int n_folds = 0;
  const auto fold_of = group_kfold(data.groups, cfg.group_folds, &n_folds);
  std::vector<Split> splits;
  if (n_folds < 2) return splits;
  splits.resize(static_cast<std::size_t>(n_folds));
  for (int f = 0; f < n_folds; ++f) {
    std::vector<Eigen::Index> tr, va;
    for (std::size_t i = 0; i < fold_of.size(); ++i) (fold_of[i] == f ? va : tr).push_back(static_cast<Eigen::Index>(i));
    Split& s = splits[static_cast<std::size_t>(f)];
    s.train = data.subset(tr).with_columns(features);
    s.valid = data.subset(va).with_columns(features);
    if (scale) {
      const auto p = standardize_fit(s.train.X);
      s.Xtr = standardize_apply(p, s.train.X);
      s.Xva = standardize_apply(p, s.valid.X);
    } else {
      s.Xtr = s.train.X;
      s.Xva = s.valid.X;
    }
    if (distances) {
      s.Dtr = squared_distances(s.Xtr, s.Xtr);
      s.Dva = squared_distances(s.Xva, s.Xtr);
    }
  }
  return splits;
}

double score_split(const Split& s, ClassifierKind kind, const HyperParams& hp, const PipelineConfig& cfg,
                   std::uint64_t seed) {
  if (s.valid.rows() == 0) return 0.0;
  Labels pred;
  switch (kind) {
    case ClassifierKind::Svm: {
      const SvmParams sp{hp.C, hp.gamma, Kernel::Rbf, cfg.svm_tol, 0};
      const DualSolution sol = smo_solve((-hp.gamma * s.Dtr).array().exp().matrix(), s.train.y, sp);
      const Vec coef = sol.alpha.cwiseProduct(sol.signs);
      const Vec f = (-hp.gamma * s.Dva).array().exp().matrix() * coef;
      pred.resize(f.size());
      for (Eigen::Index i = 0; i < f.size(); ++i) pred(i) = f(i) - sol.rho >= 0.0 ? kNoisy : kClean;
      break;
    }
    case ClassifierKind::Knn: {
      const int k = std::min<int>(hp.knn_k, static_cast<int>(s.Xtr.rows()));
      pred = knn_predict(s.Xtr, s.train.y, s.Xva, k);
      break;
    }
    case ClassifierKind::RandomForest: {
      ForestParams fp{cfg.rf_trees, hp.rf_max_features, seed};
      pred = rf_predict(rf_train(s.train, fp), s.Xva);
      break;
    }
  }
  return confusion(s.valid.y, pred).accuracy();
}

}  // namespace

std::string to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::RandomForest: return "rf";
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::Knn: return "knn";
  }
  return "?";
}

ClassifierKind classifier_from_string(const std::string& s) {
  if (s == "rf") return ClassifierKind::RandomForest;
  if (s == "svm") return ClassifierKind::Svm;
  if (s == "knn") return ClassifierKind::Knn;
  throw RejectedInput("unknown classifier '" + s + "' (expected rf|svm|knn)");
}

std::vector<HyperParams> make_grid(const PipelineConfig& cfg) {
  std::vector<HyperParams> grid;
  switch (cfg.kind) {
    case ClassifierKind::Svm: {
      auto Cs = cfg.C_grid;
      auto gs = cfg.gamma_grid;
      std::sort(Cs.begin(), Cs.end());
      std::sort(gs.begin(), gs.end());
      for (double C : Cs) {
        for (double g : gs) {
          HyperParams h;
          h.C = C;
          h.gamma = g;
          grid.push_back(h);
        }
      }
      break;
    }
    case ClassifierKind::Knn: {
      auto ks = cfg.knn_grid;
      std::sort(ks.begin(), ks.end());
      for (int k : ks) {
        HyperParams h;
        h.knn_k = k;
        grid.push_back(h);
      }
      break;
    }
    case ClassifierKind::RandomForest: {
      for (int m : cfg.rf_max_features_grid) {
        HyperParams h;
        h.rf_max_features = m;
        grid.push_back(h);
      }
      break;
    }
  }
  if (grid.empty()) throw RejectedInput("make_grid: empty hyper-parameter grid");
  return grid;
}

double Confusion::accuracy() const { return total() ? static_cast<double>(tp + tn) / total() : 0.0; }

double Confusion::balanced_accuracy() const {
  const int pos = tp + fn;
  const int neg = tn + fp;
  if (pos && neg) return 0.5 * (static_cast<double>(tp) / pos + static_cast<double>(tn) / neg);
  if (pos) return static_cast<double>(tp) / pos;
  if (neg) return static_cast<double>(tn) / neg;
  return 0.0;
}

Confusion confusion(const Labels& truth, const Labels& predicted) {
  if (truth.size() != predicted.size()) throw RejectedInput("confusion: size mismatch");
  Confusion c;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const bool t = truth(i) == kNoisy;
    const bool p = predicted(i) == kNoisy;
    if (t && p) ++c.tp;
    else if (!t && !p) ++c.tn;
    else if (!t && p) ++c.fp;
    else ++c.fn;
  }
  return c;
}

Labels TrainedClassifier::predict(const Mat& X) const {
  if (X.cols() != input_dim) throw RejectedInput("predict: expected " + std::to_string(input_dim) + " feature columns");
  Mat Z = take_columns(X, features);
  if (standardized) Z = standardize_apply(scaler, Z);
  switch (kind) {
    case ClassifierKind::RandomForest: return rf_predict(rf, Z);
    case ClassifierKind::Svm: return svm_predict(svm, Z);
    case ClassifierKind::Knn: return knn_predict(knn_X, knn_y, Z, std::min<int>(params.knn_k, static_cast<int>(knn_X.rows())));
  }
  return {};
}

TrainedClassifier fit_classifier(const Dataset& train, ClassifierKind kind, const HyperParams& params,
                                 const std::vector<int>& features, const PipelineConfig& cfg, std::uint64_t seed,
                                 AccessLog* log) {
  train.check();
  if (train.rows() == 0) throw RejectedInput("fit_classifier: empty training set");
  TrainedClassifier tc;
  tc.kind = kind;
  tc.params = params;
  tc.features = features;
  tc.input_dim = static_cast<int>(train.cols());
  const Dataset sub = train.with_columns(features);
  Mat Z = sub.X;
  if (needs_scaling(kind)) {
    tc.standardized = true;
    tc.scaler = standardize_fit(sub.X);
    Z = standardize_apply(tc.scaler, sub.X);
    if (log) append_ids(&log->standardizer, train);
  }
  if (log) append_ids(&log->final_fit, train);
  switch (kind) {
    case ClassifierKind::RandomForest:
      tc.rf = rf_train(sub, ForestParams{cfg.rf_trees, params.rf_max_features, seed});
      break;
    case ClassifierKind::Svm:
      tc.svm = svm_train(Z, sub.y, SvmParams{params.C, params.gamma, Kernel::Rbf, cfg.svm_tol, 0});
      break;
    case ClassifierKind::Knn:
      tc.knn_X = Z;
      tc.knn_y = sub.y;
      break;
  }
  return tc;
}

double cv_accuracy(const Dataset& train, ClassifierKind kind, const HyperParams& params,
                   const std::vector<int>& features, const PipelineConfig& cfg, std::uint64_t seed) {
  const auto splits = make_splits(train, features, cfg, needs_scaling(kind), kind == ClassifierKind::Svm);
  if (splits.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t f = 0; f < splits.size(); ++f) sum += score_split(splits[f], kind, params, cfg, derive_seed(seed, f));
  return sum / static_cast<double>(splits.size());
}

GridResult grid_search(const Dataset& train, const std::vector<HyperParams>& grid, ClassifierKind kind,
                       const std::vector<int>& features, const PipelineConfig& cfg, std::uint64_t seed,
                       AccessLog* log) {
  if (grid.empty()) throw RejectedInput("grid_search: empty grid");
  if (log) append_ids(&log->grid_search, train);
  GridResult res;
  if (grid.size() == 1) {
    res.best = grid.front();
    res.best_score = cv_accuracy(train, kind, grid.front(), features, cfg, seed);
    res.evaluated.emplace_back(grid.front(), res.best_score);
    return res;
  }
  const auto splits = make_splits(train, features, cfg, needs_scaling(kind), kind == ClassifierKind::Svm);
  std::vector<double> scores(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t g) {
    if (splits.empty()) return;
    double sum = 0.0;
    for (std::size_t f = 0; f < splits.size(); ++f) sum += score_split(splits[f], kind, grid[g], cfg, derive_seed(seed, f));
    scores[g] = sum / static_cast<double>(splits.size());
  });
  for (std::size_t g = 0; g < grid.size(); ++g) {
    res.evaluated.emplace_back(grid[g], scores[g]);
    if (scores[g] > res.best_score) {
      res.best_score = scores[g];
      res.best = grid[g];
    }
  }
  return res;
}

SelectionResult select_features(const Dataset& train, const PipelineConfig& cfg, std::uint64_t seed,
                                AccessLog* log) {
  train.check();
  if (log) append_ids(&log->selection, train);
  const auto d = static_cast<int>(train.cols());
  SelectionResult res;

  std::vector<int> ks;
  for (int k : cfg.k_grid) ks.push_back(std::clamp(k, 1, d));
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.empty()) ks.push_back(d);

  // Rank features by RF importance on each split's training part.
  int n_folds = 0;
  const auto fold_of = group_kfold(train.groups, cfg.group_folds, &n_folds);
  std::vector<Dataset> parts;
  if (n_folds < 2) {
    parts.push_back(train);
  } else {
    for (int f = 0; f < n_folds; ++f) {
      std::vector<Eigen::Index> rows;
      for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] != f) rows.push_back(static_cast<Eigen::Index>(i));
      }
      parts.push_back(train.subset(rows));
    }
  }
  res.mean_rank = Vec::Zero(d);
  if (ks.size() > 1 || ks.front() < d) {
    std::vector<Vec> ranks(parts.size());
    parallel_for(parts.size(), [&](std::size_t p) {
      const RFModel rf = rf_train(parts[p], ForestParams{cfg.selection_trees, 0, derive_seed(seed, 1000 + p)});
      std::vector<int> order = all_columns(d);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return rf.importance(a) > rf.importance(b); });
      ranks[p] = Vec(d);
      for (int r = 0; r < d; ++r) ranks[p](order[static_cast<std::size_t>(r)]) = r + 1;
    });
    for (const auto& r : ranks) res.mean_rank += r;
    res.mean_rank /= static_cast<double>(ranks.size());
  } else {
    for (int j = 0; j < d; ++j) res.mean_rank(j) = j + 1;
  }
  std::vector<int> order = all_columns(d);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return res.mean_rank(a) < res.mean_rank(b); });

  if (ks.size() == 1) {
    res.best_k = ks.front();
  } else {
    double best = -1.0;
    for (int k : ks) {
      std::vector<int> top(order.begin(), order.begin() + k);
      std::sort(top.begin(), top.end());
      HyperParams hp;
      hp.C = cfg.selection_C;
      hp.gamma = 1.0 / k;
      PipelineConfig scoring = cfg;
      scoring.rf_trees = cfg.selection_trees;
      const double acc = cv_accuracy(train, cfg.kind, hp, top, scoring, derive_seed(seed, 2000 + static_cast<std::uint64_t>(k)));
      res.k_scores.emplace_back(k, acc);
      if (acc > best) {
        best = acc;
        res.best_k = k;
      }
    }
  }
  res.features.assign(order.begin(), order.begin() + res.best_k);
  std::sort(res.features.begin(), res.features.end());
  return res;
}

void EvalReport::recompute_aggregates(int n_features) {
  mean_accuracy = std_accuracy = mean_balanced_accuracy = 0.0;
  selection_counts.assign(static_cast<std::size_t>(n_features), 0);
  if (folds.empty()) return;
  for (const auto& f : folds) {
    mean_accuracy += f.accuracy;
    mean_balanced_accuracy += f.balanced_accuracy;
    for (int j : f.selected) {
      if (j >= 0 && j < n_features) ++selection_counts[static_cast<std::size_t>(j)];
    }
  }
  const double n = static_cast<double>(folds.size());
  mean_accuracy /= n;
  mean_balanced_accuracy /= n;
  double ss = 0.0;
  for (const auto& f : folds) ss += (f.accuracy - mean_accuracy) * (f.accuracy - mean_accuracy);
  std_accuracy = std::sqrt(ss / n);
}

namespace {

TrainedClassifier fit_fold(const Dataset& train, const PipelineConfig& cfg, std::uint64_t seed, AccessLog* log,
                           SelectionResult* sel_out, GridResult* grid_out) {
  const auto d = static_cast<int>(train.cols());
  SelectionResult sel;
  if (cfg.selection) {
    sel = select_features(train, cfg, derive_seed(seed, 1), log);
  } else {
    sel.features = all_columns(d);
    sel.best_k = d;
  }
  const GridResult grid = grid_search(train, make_grid(cfg), cfg.kind, sel.features, cfg, derive_seed(seed, 2), log);
  TrainedClassifier tc = fit_classifier(train, cfg.kind, grid.best, sel.features, cfg, derive_seed(seed, 3), log);
  if (sel_out) *sel_out = std::move(sel);
  if (grid_out) *grid_out = grid;
  return tc;
}

}  // namespace

EvalReport loso_evaluate(const Dataset& ds, const PipelineConfig& cfg) {
  ds.check();
  const auto subjects = ds.distinct_groups();
  if (subjects.size() < 2) throw RejectedInput("loso_evaluate: need at least 2 subjects");
  EvalReport report;
  report.kind = cfg.kind;
  report.selection = cfg.selection;
  report.method = to_string(cfg.kind);

  std::vector<FoldReport> folds(subjects.size());
  std::vector<char> keep(subjects.size(), 1);
  parallel_for(subjects.size(), [&](std::size_t s) {
    const std::string& held = subjects[s];
    std::vector<Eigen::Index> tr, te;
    for (std::size_t i = 0; i < ds.groups.size(); ++i) (ds.groups[i] == held ? te : tr).push_back(static_cast<Eigen::Index>(i));
    if (te.empty()) {
      std::cerr << "warning: loso_evaluate: subject " << held << " has no windows; fold skipped\n";
      keep[s] = 0;
      return;
    }
    const Dataset train = ds.subset(tr);
    const Dataset test = ds.subset(te);
    FoldReport& f = folds[s];
    f.held_out = held;
    f.n_train = static_cast<int>(train.rows());
    f.n_test = static_cast<int>(test.rows());
    f.test_rows = test.row_ids;
    SelectionResult sel;
    GridResult grid;
    const TrainedClassifier tc = fit_fold(train, cfg, derive_seed(cfg.seed, s), &f.audit, &sel, &grid);
    f.selected = sel.features;
    f.params = grid.best;
    f.grid_points = static_cast<int>(grid.evaluated.size());
    f.counts = confusion(test.y, tc.predict(test.X));
    f.accuracy = f.counts.accuracy();
    f.balanced_accuracy = f.counts.balanced_accuracy();
    normalize_ids(f.audit.standardizer);
    normalize_ids(f.audit.selection);
    normalize_ids(f.audit.grid_search);
    normalize_ids(f.audit.final_fit);
  });
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    if (keep[s]) report.folds.push_back(std::move(folds[s]));
  }
  report.recompute_aggregates(static_cast<int>(ds.cols()));
  return report;
}

TrainedClassifier train_pipeline(const Dataset& ds, const PipelineConfig& cfg, AccessLog* log) {
  ds.check();
  return fit_fold(ds, cfg, derive_seed(cfg.seed, 999'999), log, nullptr, nullptr);
}

std::vector<std::string> audit_leakage(const EvalReport& report, const Dataset& ds) {
  std::map<std::int64_t, std::string> group_of;
  for (std::size_t i = 0; i < ds.row_ids.size(); ++i) group_of[ds.row_ids[i]] = ds.groups[i];
  std::vector<std::string> problems;
  auto check_stage = [&](const FoldReport& f, const std::vector<std::int64_t>& ids, const char* stage, bool required) {
    if (required && ids.empty()) problems.push_back("fold " + f.held_out + ": stage " + stage + " recorded no rows");
    for (auto id : ids) {
      auto it = group_of.find(id);
      if (it == group_of.end()) {
        problems.push_back("fold " + f.held_out + ": stage " + stage + " saw unknown row " + std::to_string(id));
      } else if (it->second == f.held_out) {
        problems.push_back("fold " + f.held_out + ": stage " + stage + " saw held-out row " + std::to_string(id));
      }
    }
  };
  for (const auto& f : report.folds) {
    check_stage(f, f.audit.standardizer, "standardizer", report.kind != ClassifierKind::RandomForest);
    check_stage(f, f.audit.selection, "selection", report.selection);
    check_stage(f, f.audit.grid_search, "grid_search", true);
    check_stage(f, f.audit.final_fit, "final_fit", true);
    for (auto id : f.test_rows) {
      auto it = group_of.find(id);
      if (it == group_of.end() || it->second != f.held_out) {
        problems.push_back("fold " + f.held_out + ": test row " + std::to_string(id) + " not from held-out subject");
      }
    }
  }
  return problems;
}

std::vector<int> consistent_features(const EvalReport& report) {
  std::vector<int> out;
  const double half = 0.5 * static_cast<double>(report.folds.size());
  for (std::size_t j = 0; j < report.selection_counts.size(); ++j) {
    if (report.selection_counts[j] > 0 && report.selection_counts[j] >= half) out.push_back(static_cast<int>(j));
  }
  return out;
}

}  // namespace edaqa
