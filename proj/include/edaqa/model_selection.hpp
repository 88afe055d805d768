#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edaqa/dataset.hpp"
#include "edaqa/forest.hpp"
#include "edaqa/svm.hpp"

namespace edaqa {

enum class ClassifierKind { RandomForest, Svm, Knn };

std::string to_string(ClassifierKind k);
ClassifierKind classifier_from_string(const std::string& s);

struct HyperParams {
  double C = 10.0;
  double gamma = 0.1;
  int knn_k = 5;
  int rf_max_features = 0;  // 0 -> floor(sqrt(#features))

  bool operator==(const HyperParams&) const = default;
};

struct PipelineConfig {
  ClassifierKind kind = ClassifierKind::Svm;
  bool selection = true;
  std::vector<int> k_grid{5, 10, 15, 20, 30, 52};
  std::vector<double> C_grid{1.0, 10.0, 100.0, 1000.0};
  std::vector<double> gamma_grid{0.001, 0.01, 0.1, 1.0};
  std::vector<int> knn_grid{3, 5, 7, 9};
  std::vector<int> rf_max_features_grid{0};
  int rf_trees = 500;
  int selection_trees = 100;  // forests used for importance ranking
  int group_folds = 5;
  double svm_tol = 1e-3;
  double selection_C = 10.0;  // SVM scoring top-k sets; gamma = 1/k
  std::uint64_t seed = 0;
};

/// Grid points for the configured classifier, in tie-break order (ascending
/// C then gamma for SVM).
std::vector<HyperParams> make_grid(const PipelineConfig& cfg);

/// Row ids each fitting stage actually received.
struct AccessLog {
  std::vector<std::int64_t> standardizer;
  std::vector<std::int64_t> selection;
  std::vector<std::int64_t> grid_search;
  std::vector<std::int64_t> final_fit;
};

/// A fitted model together with its column subset and (for SVM/KNN) the
/// z-score parameters fitted on its training rows. predict() takes rows with
/// every feature column.
struct TrainedClassifier {
  ClassifierKind kind = ClassifierKind::Svm;
  HyperParams params;
  std::vector<int> features;
  int input_dim = 0;
  bool standardized = false;
  StandardizerParams scaler;
  RFModel rf;
  SVMModel svm;
  Mat knn_X;
  Labels knn_y;

  Labels predict(const Mat& X) const;
};

TrainedClassifier fit_classifier(const Dataset& train, ClassifierKind kind, const HyperParams& params,
                                 const std::vector<int>& features, const PipelineConfig& cfg, std::uint64_t seed,
                                 AccessLog* log = nullptr);

/// Mean group k-fold validation accuracy of one configuration.
double cv_accuracy(const Dataset& train, ClassifierKind kind, const HyperParams& params,
                   const std::vector<int>& features, const PipelineConfig& cfg, std::uint64_t seed);

struct GridResult {
  HyperParams best;
  double best_score = -1.0;
  std::vector<std::pair<HyperParams, double>> evaluated;
};

/// Exhaustive group k-fold grid search; first strictly-better point wins, so
/// ties favour earlier grid points.
GridResult grid_search(const Dataset& train, const std::vector<HyperParams>& grid, ClassifierKind kind,
                       const std::vector<int>& features, const PipelineConfig& cfg, std::uint64_t seed,
                       AccessLog* log = nullptr);

struct SelectionResult {
  std::vector<int> features;  // ascending column indices
  Vec mean_rank;              // 1 = most important, averaged over splits
  std::vector<std::pair<int, double>> k_scores;
  int best_k = 0;
};

/// RF-importance feature selection: rank features on each group-fold split,
/// average ranks, score each top-k by group k-fold accuracy of the pipeline
/// classifier, keep the best k (ties -> smaller k).
SelectionResult select_features(const Dataset& train, const PipelineConfig& cfg, std::uint64_t seed,
                                AccessLog* log = nullptr);

struct Confusion {
  int tp = 0, tn = 0, fp = 0, fn = 0;  // positive = Noisy
  int total() const { return tp + tn + fp + fn; }
  double accuracy() const;
  double balanced_accuracy() const;
};

Confusion confusion(const Labels& truth, const Labels& predicted);

struct FoldReport {
  std::string held_out;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  Confusion counts;
  std::vector<int> selected;
  HyperParams params;
  int grid_points = 0;
  int n_train = 0;
  int n_test = 0;
  AccessLog audit;
  std::vector<std::int64_t> test_rows;
};

struct EvalReport {
  std::string method;
  ClassifierKind kind = ClassifierKind::Svm;
  bool selection = true;
  std::vector<FoldReport> folds;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std across folds
  double mean_balanced_accuracy = 0.0;
  std::vector<int> selection_counts;  // folds in which each feature was selected

  void recompute_aggregates(int n_features);
};

/// Leave-one-subject-out: per held-out subject, fit scaler, selection, grid
/// search and the final model on the other subjects only.
EvalReport loso_evaluate(const Dataset& ds, const PipelineConfig& cfg);

/// Fits selection + grid search + final model on all rows (deployment model).
TrainedClassifier train_pipeline(const Dataset& ds, const PipelineConfig& cfg, AccessLog* log = nullptr);

/// Returns one message per leakage violation; empty means the audit passed.
std::vector<std::string> audit_leakage(const EvalReport& report, const Dataset& ds);

/// Features chosen in at least half of the folds.
std::vector<int> consistent_features(const EvalReport& report);

}  // namespace edaqa
