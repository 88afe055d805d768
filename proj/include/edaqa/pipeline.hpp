#pragma once

#include <string>
#include <vector>

#include "edaqa/baseline.hpp"
#include "edaqa/config.hpp"
#include "edaqa/dataset.hpp"
#include "edaqa/features.hpp"
#include "edaqa/io.hpp"
#include "edaqa/labeling.hpp"
#include "edaqa/model_selection.hpp"
#include "edaqa/ttest.hpp"

namespace edaqa {

/// Decimates to `analysis_fs` when the record is sampled faster.
TimeSeries to_analysis_rate(const TimeSeries& ts, double analysis_fs);

/// Feature vectors for every window of a record. The decomposition runs on
/// the whole record and is sliced per window. With `labels` empty every
/// window is featurized with a Clean placeholder; otherwise Discarded
/// windows are skipped.
std::vector<FeatureVector> featurize_record(const TimeSeries& target, const std::vector<QualityLabel>& labels,
                                            const FeatureOptions& opt = {});

/// Rows of non-Discarded vectors; row ids are positions in `rows`.
Dataset make_dataset(const std::vector<FeatureVector>& rows);

struct SubjectResult {
  std::string subject_id;
  std::vector<LabeledWindow> labels;
  std::vector<FeatureVector> features;
  std::vector<QualityLabel> rules;
};

/// Correlation labels, features and rule labels for one subject's channel pair.
SubjectResult process_subject(const TimeSeries& target, const TimeSeries& reference, const ReviewerMarks& marks,
                              const RunConfig& cfg);

std::vector<LabelRow> label_rows(const std::vector<LabeledWindow>& labels);

/// Rule labels scored against reference labels per subject (Discarded
/// reference windows excluded). One fold per subject, method "rules".
EvalReport evaluate_rules(const std::vector<LabelRow>& truth, const std::vector<LabelRow>& rules);

struct FeatureTTest {
  int feature = 0;
  double mean_clean = 0.0;
  double mean_noisy = 0.0;
  WelchResult result;
};

/// Welch test of clean vs noisy values for each listed column.
std::vector<FeatureTTest> feature_ttests(const Dataset& ds, const std::vector<int>& features);

/// Mean +- std accuracy per method.
std::string format_results_table(const std::vector<EvalReport>& reports);
/// Features chosen in at least half the folds, grouped by family.
std::string format_selection_table(const EvalReport& report);
std::string format_ttest_table(const std::vector<FeatureTTest>& rows);
std::string ttest_csv(const std::vector<FeatureTTest>& rows, const Provenance& prov);

}  // namespace edaqa
