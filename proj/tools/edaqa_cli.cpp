// edaqa: motion-artifact detection for EDA recordings.
//
//   edaqa config    [--preset NAME]                 print a RunConfig
//   edaqa synth     --config C --out DIR            synthetic corpus
//   edaqa label     --corpus DIR --out labels.csv   correlation labels
//   edaqa featurize --corpus DIR --labels L --out features.csv
//   edaqa baseline  --corpus DIR --out rules.csv    rule-based labels
//   edaqa evaluate  --features F --out DIR          LOSO report
//   edaqa train     --features F --out model.json
//   edaqa detect    --model M --signal S --out labels.csv
//   edaqa report    --corpus DIR --out DIR          label+featurize+evaluate

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "edaqa/corpus.hpp"
#include "edaqa/error.hpp"
#include "edaqa/io.hpp"
#include "edaqa/model_io.hpp"
#include "edaqa/parallel.hpp"
#include "edaqa/pipeline.hpp"

namespace fs = std::filesystem;
using namespace edaqa;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string classifier;
  bool no_selection = false;
  std::string out;
};

RunConfig resolve_config(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) {
    try {
      cfg = load_run_config(c.config_path);
    } catch (const RejectedInput& e) {
      throw UsageError(e.what());
    }
  }
  if (c.seed) cfg.set_seed(*c.seed);
  if (c.threads) cfg.threads = *c.threads;
  if (cfg.threads < 1) throw UsageError("--threads must be at least 1");
  if (!c.classifier.empty()) cfg.ml.kind = classifier_from_string(c.classifier);
  if (c.no_selection) cfg.ml.selection = false;
  set_worker_count(cfg.threads);
  return cfg;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::vector<LabelRow> label_corpus(const std::string& corpus, const RunConfig& cfg) {
  const auto subjects = list_subjects(corpus);
  std::vector<std::vector<LabelRow>> per(subjects.size());
  parallel_for(subjects.size(), [&](std::size_t i) {
    SubjectFiles s = load_subject(corpus, subjects[i]);
    if (!s.reference) {
      throw DataError("subject " + subjects[i] + ": reference channel (reference.csv) is missing");
    }
    const TimeSeries t = to_analysis_rate(s.target, cfg.features.analysis_fs);
    const TimeSeries r = to_analysis_rate(*s.reference, cfg.features.analysis_fs);
    per[i] = label_rows(label_record(t, r, s.marks, cfg.label, cfg.features.win_sec));
  });
  std::vector<LabelRow> all;
  for (auto& p : per) all.insert(all.end(), p.begin(), p.end());
  return all;
}

std::vector<FeatureVector> featurize_corpus(const std::string& corpus, const std::vector<LabelRow>& labels,
                                            const RunConfig& cfg) {
  std::map<std::string, std::vector<QualityLabel>> by_subject;
  for (const auto& r : labels) {
    auto& v = by_subject[r.subject_id];
    if (v.size() <= r.window_index) v.resize(r.window_index + 1, QualityLabel::Discarded);
    v[r.window_index] = r.label;
  }
  const auto subjects = list_subjects(corpus);
  std::vector<std::vector<FeatureVector>> per(subjects.size());
  parallel_for(subjects.size(), [&](std::size_t i) {
    auto it = by_subject.find(subjects[i]);
    if (it == by_subject.end()) return;
    SubjectFiles s = load_subject(corpus, subjects[i]);
    const TimeSeries t = to_analysis_rate(s.target, cfg.features.analysis_fs);
    auto lab = it->second;
    lab.resize(segment(t, cfg.features.win_sec).size(), QualityLabel::Discarded);
    per[i] = featurize_record(t, lab, cfg.features);
  });
  std::vector<FeatureVector> all;
  for (auto& p : per) all.insert(all.end(), p.begin(), p.end());
  return all;
}

std::vector<LabelRow> baseline_corpus(const std::string& corpus, const RunConfig& cfg) {
  const auto subjects = list_subjects(corpus);
  std::vector<std::vector<LabelRow>> per(subjects.size());
  parallel_for(subjects.size(), [&](std::size_t i) {
    SubjectFiles s = load_subject(corpus, subjects[i]);
    const TimeSeries t = to_analysis_rate(s.target, cfg.features.analysis_fs);
    const auto labels = rule_labels(t, cfg.baseline, cfg.features.win_sec);
    for (std::size_t w = 0; w < labels.size(); ++w) {
      per[i].push_back({subjects[i], w, std::numeric_limits<double>::quiet_NaN(), labels[w]});
    }
  });
  std::vector<LabelRow> all;
  for (auto& p : per) all.insert(all.end(), p.begin(), p.end());
  return all;
}

void print_label_summary(const std::vector<LabelRow>& rows) {
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& r : rows) ++counts[static_cast<int>(r.label)];
  std::printf("windows: %zu  clean: %zu  noisy: %zu  discarded: %zu\n", rows.size(), counts[0], counts[1], counts[2]);
}

struct EvalOutputs {
  std::vector<EvalReport> reports;
  std::vector<FeatureTTest> ttests;
};

// LOSO for the configured classifier (and RF alongside SVM when `both`), the
// rules comparison row, the t-table and the audit.
EvalOutputs run_evaluation(const std::vector<FeatureVector>& rows, const RunConfig& cfg, const std::string& out_dir,
                           const std::vector<LabelRow>* truth, const std::vector<LabelRow>* rules,
                           bool both_ml) {
  const Dataset ds = make_dataset(rows);
  if (ds.distinct_groups().size() < 2) {
    throw UsageError("evaluate needs windows from at least 2 subjects, got " +
                     std::to_string(ds.distinct_groups().size()));
  }
  if (!ds.has_both_classes()) std::fprintf(stderr, "warning: only one class present; the report is partial\n");

  EvalOutputs out;
  std::vector<ClassifierKind> kinds{cfg.ml.kind};
  if (both_ml && cfg.ml.kind != ClassifierKind::RandomForest) kinds.push_back(ClassifierKind::RandomForest);
  for (ClassifierKind k : kinds) {
    PipelineConfig pc = cfg.ml;
    pc.kind = k;
    EvalReport rep = loso_evaluate(ds, pc);
    const auto violations = audit_leakage(rep, ds);
    if (!violations.empty()) {
      for (const auto& v : violations) std::fprintf(stderr, "leakage: %s\n", v.c_str());
      throw std::logic_error("leakage audit failed for " + rep.method);
    }
    for (const auto& f : rep.folds) {
      if (f.counts.tp + f.counts.fn == 0 || f.counts.tn + f.counts.fp == 0) {
        std::fprintf(stderr, "warning: held-out subject %s has a single class\n", f.held_out.c_str());
      }
    }
    out.reports.push_back(std::move(rep));
  }
  if (truth && rules) out.reports.push_back(evaluate_rules(*truth, *rules));

  const EvalReport& primary = out.reports.front();
  std::vector<int> chosen = primary.selection ? consistent_features(primary) : std::vector<int>{};
  if (chosen.empty()) {
    for (int j = 0; j < kFeatureCount; ++j) chosen.push_back(j);
  }
  out.ttests = feature_ttests(ds, chosen);

  const Provenance prov = Provenance::of(cfg);
  fs::create_directories(out_dir);
  nlohmann::json j = {{"provenance", prov.to_json()}, {"reports", nlohmann::json::array()}, {"leakage_audit", "pass"}};
  for (const auto& r : out.reports) j["reports"].push_back(report_to_json(r));
  write_text((fs::path(out_dir) / "report.json").string(), j.dump(2) + "\n");
  write_text((fs::path(out_dir) / "folds.csv").string(), report_folds_csv(out.reports, prov));
  write_text((fs::path(out_dir) / "ttest.csv").string(), ttest_csv(out.ttests, prov));

  std::string text = format_results_table(out.reports) + "\n";
  if (primary.selection) text += format_selection_table(primary) + "\n";
  text += format_ttest_table(out.ttests);
  write_text((fs::path(out_dir) / "tables.txt").string(), prov.csv_comment() + "\n" + text);
  std::fputs(text.c_str(), stdout);
  return out;
}

void add_common(CLI::App* sub, Common& c, bool ml_flags) {
  sub->add_option("--config", c.config_path, "RunConfig JSON file")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "master seed (overrides the config)");
  sub->add_option("--threads", c.threads, "worker threads");
  if (ml_flags) {
    sub->add_option("--classifier", c.classifier, "rf, svm or knn")->check(CLI::IsMember({"rf", "svm", "knn"}));
    sub->add_flag("--no-selection", c.no_selection, "use all 52 features");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edaqa: EDA motion-artifact labeling, features and classification"};
  app.require_subcommand(1);
  Common c;
  std::string corpus, labels_path, features_path, model_path, signal_path, meta_path, preset, rules_path, truth_path;

  auto* cfg_cmd = app.add_subcommand("config", "print a RunConfig as JSON");
  add_common(cfg_cmd, c, true);
  cfg_cmd->add_option("--preset", preset, "clean, medium, easy or spikes");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(synth, c, false);
  synth->add_option("--out", c.out, "output directory")->required();

  auto* label = app.add_subcommand("label", "correlation labels for a corpus");
  add_common(label, c, false);
  label->add_option("--corpus", corpus)->required();
  label->add_option("--out", c.out, "labels CSV")->required();

  auto* featurize = app.add_subcommand("featurize", "52-feature rows for labeled windows");
  add_common(featurize, c, false);
  featurize->add_option("--corpus", corpus)->required();
  featurize->add_option("--labels", labels_path)->required()->check(CLI::ExistingFile);
  featurize->add_option("--out", c.out, "features CSV")->required();

  auto* baseline = app.add_subcommand("baseline", "rule-based window labels");
  add_common(baseline, c, false);
  baseline->add_option("--corpus", corpus)->required();
  baseline->add_option("--out", c.out, "labels CSV")->required();

  auto* evaluate = app.add_subcommand("evaluate", "leave-one-subject-out evaluation");
  add_common(evaluate, c, true);
  evaluate->add_option("--features", features_path)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--labels", truth_path, "reference labels for the rules row")->check(CLI::ExistingFile);
  evaluate->add_option("--rules", rules_path, "rule-based labels from `baseline`")->check(CLI::ExistingFile);
  evaluate->add_option("--out", c.out, "output directory")->required();

  auto* train = app.add_subcommand("train", "fit the deployment model on all rows");
  add_common(train, c, true);
  train->add_option("--features", features_path)->required()->check(CLI::ExistingFile);
  train->add_option("--out", c.out, "model JSON")->required();

  auto* detect = app.add_subcommand("detect", "label a single-channel record with a trained model");
  add_common(detect, c, false);
  detect->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  detect->add_option("--signal", signal_path)->required()->check(CLI::ExistingFile);
  detect->add_option("--meta", meta_path, "signal metadata JSON")->check(CLI::ExistingFile);
  detect->add_option("--out", c.out, "labels CSV")->required();

  auto* report = app.add_subcommand("report", "label, featurize, baseline and evaluate a corpus");
  add_common(report, c, true);
  report->add_option("--corpus", corpus)->required();
  report->add_option("--out", c.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    const RunConfig cfg = resolve_config(c);
    const Provenance prov = Provenance::of(cfg);

    if (*cfg_cmd) {
      RunConfig out = cfg;
      if (!preset.empty()) {
        try {
          out = preset_config(preset);
        } catch (const RejectedInput& e) {
          throw UsageError(e.what());
        }
      }
      if (!preset.empty()) {
        out.set_seed(cfg.seed);
        out.threads = cfg.threads;
      }
      std::cout << to_json(out).dump(2) << "\n";
    } else if (*synth) {
      if (!cfg.has_synth) throw UsageError("synth needs a --config with a \"synth\" section");
      generate_corpus(cfg, c.out);
      std::printf("wrote %d subjects to %s\n", cfg.synth.n_subjects, c.out.c_str());
    } else if (*label) {
      const auto rows = label_corpus(corpus, cfg);
      ensure_parent(c.out);
      write_labels_csv(rows, c.out, prov);
      print_label_summary(rows);
    } else if (*featurize) {
      const auto rows = featurize_corpus(corpus, read_labels_csv(labels_path), cfg);
      ensure_parent(c.out);
      write_features_csv(rows, c.out, prov);
      std::printf("wrote %zu feature rows\n", rows.size());
    } else if (*baseline) {
      const auto rows = baseline_corpus(corpus, cfg);
      ensure_parent(c.out);
      write_labels_csv(rows, c.out, prov, "rules");
      print_label_summary(rows);
    } else if (*evaluate) {
      int version = 0;
      const auto rows = read_features_csv(features_path, &version);
      if (version != 0 && version != kFeatureMapVersion) {
        throw DataError("features file uses feature map version " + std::to_string(version) + ", this build uses " +
                        std::to_string(kFeatureMapVersion));
      }
      std::optional<std::vector<LabelRow>> truth, rules;
      if (!truth_path.empty()) truth = read_labels_csv(truth_path);
      if (!rules_path.empty()) rules = read_labels_csv(rules_path);
      if (truth.has_value() != rules.has_value()) throw UsageError("--labels and --rules must be given together");
      run_evaluation(rows, cfg, c.out, truth ? &*truth : nullptr, rules ? &*rules : nullptr, false);
    } else if (*train) {
      int version = 0;
      const Dataset ds = make_dataset(read_features_csv(features_path, &version));
      if (version != 0 && version != kFeatureMapVersion) {
        throw DataError("features file uses feature map version " + std::to_string(version) + ", this build uses " +
                        std::to_string(kFeatureMapVersion));
      }
      if (ds.rows() == 0) throw DataError("no labeled rows in " + features_path);
      const TrainedClassifier model = train_pipeline(ds, cfg.ml);
      ensure_parent(c.out);
      save_model(model, prov, c.out);
      std::printf("trained %s on %lld rows, %zu features\n", to_string(model.kind).c_str(),
                  static_cast<long long>(ds.rows()), model.features.size());
    } else if (*detect) {
      int version = 0;
      const TrainedClassifier model = load_model(model_path, &version);
      if (version != kFeatureMapVersion) {
        throw DataError("model feature map version " + std::to_string(version) +
                        " does not match this build's version " + std::to_string(kFeatureMapVersion));
      }
      TimeSeries ts = read_signal(signal_path, meta_path.empty() ? std::nullopt : std::optional<std::string>(meta_path));
      if (ts.subject_id.empty()) ts.subject_id = fs::path(signal_path).stem().string();
      std::vector<LabelRow> out_rows;
      if (ts.samples.size() > 0) {
        const TimeSeries t = to_analysis_rate(ts, cfg.features.analysis_fs);
        const auto rows = featurize_record(t, {}, cfg.features);
        if (!rows.empty()) {
          Mat X(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
          for (std::size_t i = 0; i < rows.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = rows[i].values.transpose();
          const Labels pred = model.predict(X);
          for (std::size_t i = 0; i < rows.size(); ++i) {
            out_rows.push_back({ts.subject_id, rows[i].window_index, std::numeric_limits<double>::quiet_NaN(),
                                pred(static_cast<Eigen::Index>(i)) == kNoisy ? QualityLabel::Noisy : QualityLabel::Clean});
          }
        }
      }
      ensure_parent(c.out);
      write_labels_csv(out_rows, c.out, prov, "model");
      print_label_summary(out_rows);
    } else if (*report) {
      const auto truth = label_corpus(corpus, cfg);
      const auto rules = baseline_corpus(corpus, cfg);
      const auto rows = featurize_corpus(corpus, truth, cfg);
      fs::create_directories(c.out);
      write_labels_csv(truth, (fs::path(c.out) / "labels.csv").string(), prov);
      write_labels_csv(rules, (fs::path(c.out) / "rules.csv").string(), prov, "rules");
      write_features_csv(rows, (fs::path(c.out) / "features.csv").string(), prov);
      print_label_summary(truth);
      run_evaluation(rows, cfg, c.out, &truth, &rules, true);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const FeatureError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const RejectedInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
