#include <doctest.h>

#include <limits>

#include "edaqa/baseline.hpp"
#include "edaqa/error.hpp"
#include "edaqa/labeling.hpp"
#include "edaqa/synthgen.hpp"

using namespace edaqa;

namespace {

TimeSeries flat(double value, Eigen::Index n, double fs = 8.0) {
  TimeSeries ts;
  ts.fs = fs;
  ts.samples = Vec::Constant(n, value);
  return ts;
}

std::size_t count(const SampleMask& m) { return static_cast<std::size_t>(std::count(m.begin(), m.end(), true)); }

}  // namespace

TEST_CASE("rule mask examples") {
  CHECK(count(rule_mask(flat(5.0, 800))) == 0);

  TimeSeries dip = flat(5.0, 800);
  dip.samples(400) = 0.01;
  const SampleMask m = rule_mask(dip);
  // the low sample and its two slope neighbours, each dilated by 40 samples
  for (Eigen::Index k = 360; k <= 440; ++k) CHECK(m[static_cast<std::size_t>(k)]);
  RuleConfig no_slope;
  no_slope.max_slope = std::numeric_limits<double>::infinity();
  const SampleMask only_range = rule_mask(dip, no_slope);
  CHECK(count(only_range) == 81);
  CHECK(only_range[360]);
  CHECK(only_range[440]);
  CHECK_FALSE(only_range[359]);
  CHECK_FALSE(only_range[441]);

  TimeSeries ramp = flat(5.0, 80);
  for (Eigen::Index k = 0; k < 80; ++k) ramp.samples(k) = 5.0 + 15.0 * static_cast<double>(k) / 8.0;
  RuleConfig wide;
  wide.eda_max = 1e9;
  wide.dilation_radius = 0;
  CHECK(count(rule_mask(ramp, wide)) == 80);
  for (Eigen::Index k = 0; k < 80; ++k) ramp.samples(k) = 5.0 + 9.0 * static_cast<double>(k) / 8.0;
  CHECK(count(rule_mask(ramp, wide)) == 0);
}

TEST_CASE("rule labels roll up windows") {
  TimeSeries ts = flat(5.0, 800);
  ts.samples(419) = 70.0;  // last sample of window 10
  RuleConfig no_dilation;
  no_dilation.dilation_radius = 0;
  no_dilation.max_slope = std::numeric_limits<double>::infinity();
  auto labels = rule_labels(ts, no_dilation);
  REQUIRE(labels.size() == 20);
  for (std::size_t w = 0; w < 20; ++w) CHECK(labels[w] == (w == 10 ? QualityLabel::Noisy : QualityLabel::Clean));

  const auto dilated = rule_labels(ts);
  CHECK(dilated[11] == QualityLabel::Noisy);
  CHECK(dilated[9] == QualityLabel::Noisy);
  CHECK(dilated[12] == QualityLabel::Clean);
  for (auto l : dilated) CHECK(l != QualityLabel::Discarded);
}

TEST_CASE("rule monotonicity and config honesty") {
  SynthConfig sc;
  sc.artifacts = {0.6, 0.6, 0.4, 0.05, 0.2};
  const SynthRecord rec = gen_subject(sc, 0);
  std::vector<QualityLabel> prev;
  for (double radius : {0.0, 1.0, 2.5, 5.0, 10.0}) {
    RuleConfig c;
    c.dilation_radius = radius;
    const auto l = rule_labels(rec.target, c);
    if (!prev.empty()) {
      for (std::size_t w = 0; w < l.size(); ++w) {
        if (prev[w] == QualityLabel::Noisy) CHECK(l[w] == QualityLabel::Noisy);
      }
    }
    prev = l;
  }
  RuleConfig open;
  open.eda_min = -std::numeric_limits<double>::infinity();
  open.eda_max = std::numeric_limits<double>::infinity();
  open.max_slope = std::numeric_limits<double>::infinity();
  for (auto l : rule_labels(rec.target, open)) CHECK(l == QualityLabel::Clean);
}

TEST_CASE("rule_label checks alignment") {
  const SampleMask m(80, false);
  Window w;
  w.samples = Vec::Ones(40);
  w.fs = 8;
  w.start_time = 5.0;
  CHECK(rule_label(w, m) == QualityLabel::Clean);
  w.start_time = 7.0;
  CHECK_THROWS_AS(rule_label(w, m), RejectedInput);
  w.start_time = 1.01;  // not on a sample of the record grid
  CHECK_THROWS_AS(rule_label(w, m), RejectedInput);
}

TEST_CASE("RuleConfig invariants") {
  RuleConfig c;
  c.eda_min = 70;
  CHECK_THROWS_AS(c.check(), RejectedInput);
  c = {};
  c.max_slope = 0;
  CHECK_THROWS_AS(c.check(), RejectedInput);
  c = {};
  c.dilation_radius = -1;
  CHECK_THROWS_AS(c.check(), RejectedInput);
}

TEST_CASE("synthetic subjects are deterministic and well formed") {
  SynthConfig sc;
  sc.artifacts = {0.6, 0.6, 0.4, 0.05, 0.2};
  const SynthRecord a = gen_subject(sc, 3), b = gen_subject(sc, 3), c = gen_subject(sc, 4);
  CHECK(a.target.subject_id == "S04");
  CHECK(a.target.size() == 4800);
  CHECK(a.reference.size() == 4800);
  CHECK((a.target.samples.array() == b.target.samples.array()).all());
  CHECK((a.reference.samples.array() == b.reference.samples.array()).all());
  CHECK(a.artifact_mask == b.artifact_mask);
  CHECK_FALSE((a.target.samples.array() == c.target.samples.array()).all());
  CHECK((a.target.samples.array() >= 0).all());
  CHECK((a.reference.samples.array() >= 0).all());
  CHECK(a.artifact_mask.size() == 4800);
  CHECK_FALSE(a.events.empty());
  // mask true exactly where the target departs from the artifact-free signal
  SynthConfig clean = sc;
  clean.artifacts = {};
  const SynthRecord base = gen_subject(clean, 3);
  for (std::size_t k = 0; k < 4800; ++k) {
    const bool differs = a.target.samples(static_cast<Eigen::Index>(k)) != base.target.samples(static_cast<Eigen::Index>(k));
    if (differs) CHECK(a.artifact_mask[k]);
  }
}

TEST_CASE("artifact-free corpus: clean mask, high channel agreement") {
  SynthConfig sc;
  int windows = 0, high = 0;
  for (int s = 0; s < sc.n_subjects; ++s) {
    const SynthRecord r = gen_subject(sc, s);
    CHECK(std::none_of(r.artifact_mask.begin(), r.artifact_mask.end(), [](bool b) { return b; }));
    const auto tw = segment(r.target), rw = segment(r.reference);
    for (std::size_t w = 0; w < tw.size(); ++w) {
      ++windows;
      high += pearson(tw[w].samples, rw[w].samples) > 0.95 ? 1 : 0;
    }
  }
  CHECK(windows == 1200);
  CHECK(static_cast<double>(high) / windows >= 0.99);
}

TEST_CASE("no drift, SCR or jitter gives constant channels") {
  SynthConfig sc;
  sc.scr_rate = 0;
  sc.drift_scale = 0;
  sc.jitter_gain = sc.jitter_noise = sc.jitter_delay = 0;
  const SynthRecord r = gen_subject(sc, 0);
  CHECK(r.target.samples.maxCoeff() == r.target.samples.minCoeff());
  CHECK((r.reference.samples.array() == r.target.samples.array()).all());
  CHECK(r.target.samples(0) >= sc.tonic_min);
  CHECK(r.target.samples(0) <= sc.tonic_max);
}

TEST_CASE("mask to truth labels threshold") {
  SynthConfig sc;
  sc.duration_s = 60;
  SynthRecord r = gen_subject(sc, 0);
  for (auto l : mask_to_truth_labels(r)) CHECK(l == QualityLabel::Clean);
  std::fill(r.artifact_mask.begin(), r.artifact_mask.begin() + 40, true);
  r.artifact_mask[40] = r.artifact_mask[41] = r.artifact_mask[42] = true;   // 3/40 in window 1
  r.artifact_mask[80] = r.artifact_mask[81] = true;                          // 2/40 in window 2
  const auto l = mask_to_truth_labels(r);
  CHECK(l[0] == QualityLabel::Noisy);
  CHECK(l[1] == QualityLabel::Noisy);
  CHECK(l[2] == QualityLabel::Clean);
}

TEST_CASE("SynthConfig invariants") {
  SynthConfig sc;
  sc.artifacts.spike = -1;
  CHECK_THROWS_AS(sc.check(), RejectedInput);
  sc = {};
  sc.duration_s = 45;
  CHECK_THROWS_AS(sc.check(), RejectedInput);
}
