#include <doctest.h>

#include "edaqa/parallel.hpp"
#include "edaqa/pipeline.hpp"
#include "edaqa/synthgen.hpp"

using namespace edaqa;

namespace {

struct Built {
  std::vector<SynthRecord> records;
  std::vector<SubjectResult> results;
  Dataset ds;
};

Built build(const RunConfig& cfg) {
  Built b;
  const auto n = static_cast<std::size_t>(cfg.synth.n_subjects);
  b.records.resize(n);
  b.results.resize(n);
  parallel_for(n, [&](std::size_t i) {
    b.records[i] = gen_subject(cfg.synth, static_cast<int>(i));
    b.results[i] = process_subject(b.records[i].target, b.records[i].reference, ReviewerMarks{}, cfg);
  });
  std::vector<FeatureVector> rows;
  for (const auto& r : b.results) rows.insert(rows.end(), r.features.begin(), r.features.end());
  b.ds = make_dataset(rows);
  return b;
}

// Correlation labels against the injected-artifact mask, over all windows.
double fidelity(const Built& b) {
  int agree = 0, total = 0;
  for (std::size_t s = 0; s < b.records.size(); ++s) {
    const auto truth = mask_to_truth_labels(b.records[s]);
    const auto& got = b.results[s].labels;
    REQUIRE(truth.size() == got.size());
    for (std::size_t w = 0; w < truth.size(); ++w) {
      agree += truth[w] == got[w].label ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(agree) / total;
}

Labels detect(const TrainedClassifier& model, const TimeSeries& target, const RunConfig& cfg) {
  const auto rows = featurize_record(to_analysis_rate(target, cfg.features.analysis_fs), {}, cfg.features);
  Mat X(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = rows[i].values.transpose();
  return model.predict(X);
}

}  // namespace

TEST_CASE("labeler agrees with the injected-artifact mask on preset corpora") {
  set_worker_count(4);
  for (const char* preset : {"clean", "easy", "medium"}) {
    RunConfig cfg = preset_config(preset);
    cfg.synth.n_subjects = 4;
    const double f = fidelity(build(cfg));
    INFO(std::string(preset) << " fidelity " << f);
    CHECK(f >= 0.90);
  }
  set_worker_count(1);
}

TEST_CASE("easy corpus: SVM LOSO accuracy and detection on unseen records") {
  set_worker_count(4);
  RunConfig cfg = preset_config("easy");
  const Built b = build(cfg);
  const EvalReport r = loso_evaluate(b.ds, cfg.ml);
  INFO("easy SVM " << r.mean_accuracy);
  CHECK(r.folds.size() == 10);
  CHECK(r.mean_accuracy >= 0.90);

  const TrainedClassifier model = train_pipeline(b.ds, cfg.ml);

  RunConfig clean = preset_config("clean");
  clean.synth.seed = 9001;
  const Labels pc = detect(model, gen_subject(clean.synth, 0).target, cfg);
  const double clean_frac = (pc.array() == kClean).cast<double>().mean();
  INFO("clean record windows labelled Clean " << clean_frac);
  CHECK(clean_frac >= 0.90);

  RunConfig spikes = preset_config("spikes");
  spikes.synth.seed = 9002;
  const SynthRecord rec = gen_subject(spikes.synth, 0);
  const auto truth = mask_to_truth_labels(rec);
  const Labels ps = detect(model, rec.target, cfg);
  REQUIRE(static_cast<std::size_t>(ps.size()) == truth.size());
  int masked = 0, noisy = 0;
  for (std::size_t w = 0; w < truth.size(); ++w) {
    if (truth[w] != QualityLabel::Noisy) continue;
    ++masked;
    noisy += ps(static_cast<Eigen::Index>(w)) == kNoisy ? 1 : 0;
  }
  INFO("masked windows " << masked << ", predicted Noisy " << noisy);
  REQUIRE(masked > 0);
  CHECK(2 * noisy > masked);
  set_worker_count(1);
}
