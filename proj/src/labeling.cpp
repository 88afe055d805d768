#include "edaqa/labeling.hpp"

#include <algorithm>
#include <cmath>

namespace edaqa {

std::string to_string(QualityLabel l) {
  switch (l) {
    case QualityLabel::Clean: return "clean";
    case QualityLabel::Noisy: return "noisy";
    case QualityLabel::Discarded: return "discarded";
  }
  return "?";
}

QualityLabel label_from_string(const std::string& s) {
  if (s == "clean") return QualityLabel::Clean;
  if (s == "noisy") return QualityLabel::Noisy;
  if (s == "discarded") return QualityLabel::Discarded;
  throw RejectedInput("unknown label '" + s + "'");
}

bool ReviewerMarks::empty() const {
  return std::all_of(intervals.begin(), intervals.end(), [](const auto& v) { return v.empty(); });
}

void LabelConfig::check() const {
  if (!(0.0 < clean_threshold && clean_threshold < override_threshold && override_threshold <= 1.0)) {
    throw RejectedInput("LabelConfig: need 0 < clean_threshold < override_threshold <= 1");
  }
  if (!(zero_var_epsilon >= 0.0)) throw RejectedInput("LabelConfig: zero_var_epsilon must be >= 0");
}

double pearson(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y, double zero_var_epsilon) {
  if (x.size() != y.size()) throw RejectedInput("pearson: length mismatch");
  if (x.size() < 2) throw RejectedInput("pearson: need at least 2 samples");
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  const Eigen::ArrayXd dy = y.array() - my;
  const double n = static_cast<double>(x.size());
  const double vx = dx.square().sum() / n;
  const double vy = dy.square().sum() / n;
  const bool flat_x = vx < zero_var_epsilon;
  const bool flat_y = vy < zero_var_epsilon;
  if (flat_x && flat_y) return std::abs(mx - my) < zero_var_epsilon ? 1.0 : 0.0;
  if (flat_x || flat_y) return 0.0;
  const double r = (dx * dy).sum() / n / std::sqrt(vx * vy);
  return std::clamp(r, -1.0, 1.0);
}

bool ref_marked(const TimeSpan& span, double sample_period, const ReviewerMarks& marks) {
  // Small slack so an overlap of exactly one period survives rounding.
  const double need = sample_period * (1.0 - 1e-9);
  for (const auto& reviewer : marks.intervals) {
    for (const auto& m : reviewer) {
      const double overlap = std::min(span.end, m.end) - std::max(span.start, m.start);
      if (overlap >= need && overlap > 0.0) return true;
    }
  }
  return false;
}

QualityLabel decide_label(double r, bool marked, const LabelConfig& cfg) {
  if (marked) return r > cfg.override_threshold ? QualityLabel::Clean : QualityLabel::Discarded;
  return r > cfg.clean_threshold ? QualityLabel::Clean : QualityLabel::Noisy;
}

LabeledWindow label_window(const Window& target, const Window& reference, bool marked, const LabelConfig& cfg) {
  if (target.index != reference.index || target.fs != reference.fs ||
      target.samples.size() != reference.samples.size()) {
    throw RejectedInput("label_window: target and reference windows are not aligned");
  }
  LabeledWindow out;
  out.window = target;
  out.r = pearson(target.samples, reference.samples, cfg.zero_var_epsilon);
  out.ref_marked_noisy = marked;
  out.label = decide_label(out.r, marked, cfg);
  return out;
}

std::vector<LabeledWindow> label_record(const TimeSeries& target, const TimeSeries& reference,
                                        const ReviewerMarks& marks, const LabelConfig& cfg, double win_sec) {
  cfg.check();
  if (target.fs != reference.fs) throw RejectedInput("label_record: channels have different sampling rates");
  const auto tw = segment(target, win_sec);
  const auto rw = segment(reference, win_sec);
  const std::size_t n = std::min(tw.size(), rw.size());
  std::vector<LabeledWindow> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool marked = ref_marked({rw[i].start_time, rw[i].end_time()}, 1.0 / reference.fs, marks);
    out.push_back(label_window(tw[i], rw[i], marked, cfg));
  }
  return out;
}

}  // namespace edaqa
