#include "edaqa/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "edaqa/vfcdm.hpp"

namespace edaqa {

TimeSeries to_analysis_rate(const TimeSeries& ts, double analysis_fs) {
  if (std::abs(ts.fs - analysis_fs) <= 1e-9 * analysis_fs) return ts;
  if (ts.fs < analysis_fs) throw RejectedInput("record sampled below the analysis rate");
  return decimate(ts, analysis_fs);
}

std::vector<FeatureVector> featurize_record(const TimeSeries& target, const std::vector<QualityLabel>& labels,
                                            const FeatureOptions& opt) {
  const auto windows = segment(target, opt.win_sec);
  std::vector<FeatureVector> out;
  if (windows.empty()) return out;
  if (!labels.empty() && labels.size() < windows.size()) {
    throw RejectedInput("featurize_record: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(windows.size()) + " windows");
  }
  const Decomposition d = cdm_decompose(target, opt.n_bands, opt.cdm_taps);
  const Vec low = reconstruct(d, low_modes(opt.n_bands)).samples;
  const Vec high = reconstruct(d, high_modes(opt.n_bands)).samples;
  for (const auto& w : windows) {
    const QualityLabel label = labels.empty() ? QualityLabel::Clean : labels[w.index];
    if (label == QualityLabel::Discarded) continue;
    const Eigen::Index len = w.samples.size();
    const auto first = static_cast<Eigen::Index>(w.index) * len;
    out.push_back(assemble(w, low.segment(first, len), high.segment(first, len), label, opt.entropy_bins));
  }
  return out;
}

Dataset make_dataset(const std::vector<FeatureVector>& rows) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].label != QualityLabel::Discarded) keep.push_back(i);
  }
  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(keep.size()), kFeatureCount);
  ds.y.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const auto& fv = rows[keep[r]];
    ds.X.row(static_cast<Eigen::Index>(r)) = fv.values.transpose();
    ds.y(static_cast<Eigen::Index>(r)) = fv.label == QualityLabel::Noisy ? kNoisy : kClean;
    ds.groups.push_back(fv.subject_id);
    ds.row_ids.push_back(static_cast<std::int64_t>(keep[r]));
  }
  return ds;
}

SubjectResult process_subject(const TimeSeries& target, const TimeSeries& reference, const ReviewerMarks& marks,
                              const RunConfig& cfg) {
  validate(target);
  validate(reference);
  const TimeSeries t = to_analysis_rate(target, cfg.features.analysis_fs);
  const TimeSeries r = to_analysis_rate(reference, cfg.features.analysis_fs);
  SubjectResult res;
  res.subject_id = target.subject_id;
  res.labels = label_record(t, r, marks, cfg.label, cfg.features.win_sec);
  std::vector<QualityLabel> labels;
  for (const auto& lw : res.labels) labels.push_back(lw.label);
  res.features = featurize_record(t, labels, cfg.features);
  res.rules = rule_labels(t, cfg.baseline, cfg.features.win_sec);
  res.rules.resize(res.labels.size());
  return res;
}

std::vector<LabelRow> label_rows(const std::vector<LabeledWindow>& labels) {
  std::vector<LabelRow> rows;
  rows.reserve(labels.size());
  for (const auto& lw : labels) rows.push_back({lw.window.subject_id, lw.window.index, lw.r, lw.label});
  return rows;
}

EvalReport evaluate_rules(const std::vector<LabelRow>& truth, const std::vector<LabelRow>& rules) {
  std::map<std::pair<std::string, std::size_t>, QualityLabel> rule_of;
  for (const auto& r : rules) rule_of[{r.subject_id, r.window_index}] = r.label;
  std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> per_subject;
  for (const auto& t : truth) {
    if (t.label == QualityLabel::Discarded) continue;
    auto it = rule_of.find({t.subject_id, t.window_index});
    if (it == rule_of.end()) continue;
    auto& [tv, pv] = per_subject[t.subject_id];
    tv.push_back(t.label == QualityLabel::Noisy ? kNoisy : kClean);
    pv.push_back(it->second == QualityLabel::Noisy ? kNoisy : kClean);
  }
  EvalReport report;
  report.method = "rules";
  report.selection = false;
  for (const auto& [subject, tp] : per_subject) {
    const auto& [tv, pv] = tp;
    FoldReport f;
    f.held_out = subject;
    f.counts = confusion(Eigen::Map<const Labels>(tv.data(), static_cast<Eigen::Index>(tv.size())),
                         Eigen::Map<const Labels>(pv.data(), static_cast<Eigen::Index>(pv.size())));
    f.accuracy = f.counts.accuracy();
    f.balanced_accuracy = f.counts.balanced_accuracy();
    f.n_test = f.counts.total();
    report.folds.push_back(std::move(f));
  }
  report.recompute_aggregates(0);
  return report;
}

std::vector<FeatureTTest> feature_ttests(const Dataset& ds, const std::vector<int>& features) {
  std::vector<Eigen::Index> clean, noisy;
  for (Eigen::Index i = 0; i < ds.rows(); ++i) (ds.y(i) == kNoisy ? noisy : clean).push_back(i);
  std::vector<FeatureTTest> out;
  if (clean.size() < 2 || noisy.size() < 2) return out;
  for (int j : features) {
    Vec a(static_cast<Eigen::Index>(clean.size())), b(static_cast<Eigen::Index>(noisy.size()));
    for (std::size_t i = 0; i < clean.size(); ++i) a(static_cast<Eigen::Index>(i)) = ds.X(clean[i], j);
    for (std::size_t i = 0; i < noisy.size(); ++i) b(static_cast<Eigen::Index>(i)) = ds.X(noisy[i], j);
    FeatureTTest t;
    t.feature = j;
    t.mean_clean = a.mean();
    t.mean_noisy = b.mean();
    t.result = welch_t_test(a, b);
    out.push_back(t);
  }
  return out;
}

std::string format_results_table(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-22s %14s %20s %8s\n", "Method", "Mean accuracy", "Standard deviation", "Folds");
  os << buf;
  for (const auto& r : reports) {
    std::string name = r.method;
    if (r.method != "rules") name += r.selection ? " (selected)" : " (all features)";
    std::snprintf(buf, sizeof buf, "%-22s %13.2f%% %19.2f%% %8zu\n", name.c_str(), 100.0 * r.mean_accuracy,
                  100.0 * r.std_accuracy, r.folds.size());
    os << buf;
  }
  return os.str();
}

std::string format_selection_table(const EvalReport& report) {
  std::ostringstream os;
  const auto chosen = consistent_features(report);
  os << "Features selected in at least half of " << report.folds.size() << " folds:\n";
  const char* families[][2] = {{"AR modeling", "ar_"}, {"Raw EDA", "raw_"}, {"1st derivative", "d1_"},
                               {"2nd derivative", "d2_"}, {"Wavelet", "c"}, {"VFCDM", "vfcdm_"}};
  for (const auto& fam : families) {
    std::string line;
    for (int j : chosen) {
      const std::string name(feature_names()[static_cast<std::size_t>(j)]);
      if (name.rfind(fam[1], 0) != 0) continue;
      line += (line.empty() ? "" : ", ") + name + " (" +
              std::to_string(report.selection_counts[static_cast<std::size_t>(j)]) + ")";
    }
    if (!line.empty()) os << "  " << fam[0] << ": " << line << "\n";
  }
  return os.str();
}

std::string format_ttest_table(const std::vector<FeatureTTest>& rows) {
  std::ostringstream os;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-22s %14s %14s %12s %12s\n", "Feature", "mean(clean)", "mean(noisy)", "t", "p");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-22s %14.6g %14.6g %12.4g %12.3g\n",
                  std::string(feature_names()[static_cast<std::size_t>(r.feature)]).c_str(), r.mean_clean,
                  r.mean_noisy, r.result.t, r.result.p);
    os << buf;
  }
  return os.str();
}

std::string ttest_csv(const std::vector<FeatureTTest>& rows, const Provenance& prov) {
  std::ostringstream os;
  os << prov.csv_comment() << "\nfeature,mean_clean,mean_noisy,t,df,p\n";
  for (const auto& r : rows) {
    os << feature_names()[static_cast<std::size_t>(r.feature)] << ',' << format_real(r.mean_clean) << ','
       << format_real(r.mean_noisy) << ',' << format_real(r.result.t) << ',' << format_real(r.result.df) << ','
       << format_real(r.result.p) << '\n';
  }
  return os.str();
}

}  // namespace edaqa
