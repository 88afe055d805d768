#pragma once

#include <array>
#include <string>
#include <vector>

#include "edaqa/signal.hpp"

namespace edaqa {

enum class QualityLabel { Clean, Noisy, Discarded };

std::string to_string(QualityLabel l);
QualityLabel label_from_string(const std::string& s);

/// Half-open time interval [start, end) in seconds.
struct TimeSpan {
  double start = 0.0;
  double end = 0.0;
};

/// Noisy intervals marked on the reference channel, one list per reviewer.
struct ReviewerMarks {
  static constexpr int kReviewers = 3;
  std::array<std::vector<TimeSpan>, kReviewers> intervals;

  bool empty() const;
};

struct LabelConfig {
  double clean_threshold = 0.85;
  double override_threshold = 0.95;
  double zero_var_epsilon = 1e-12;

  void check() const;
};

struct LabeledWindow {
  Window window;
  double r = 0.0;
  bool ref_marked_noisy = false;
  QualityLabel label = QualityLabel::Noisy;
};

/// Zero-lag Pearson correlation. Flat inputs: both flat and equal -> 1, exactly
/// one flat -> 0 (flatness = population variance below `zero_var_epsilon`).
double pearson(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y,
               double zero_var_epsilon = 1e-12);

/// True iff any reviewer interval overlaps `span` by at least one sample period.
bool ref_marked(const TimeSpan& span, double sample_period, const ReviewerMarks& marks);

/// The decision rule on its own, exposed so labels can be re-derived.
QualityLabel decide_label(double r, bool marked, const LabelConfig& cfg);

LabeledWindow label_window(const Window& target, const Window& reference, bool marked,
                           const LabelConfig& cfg = {});

/// Labels every aligned window pair of a record; output ordered by window index.
std::vector<LabeledWindow> label_record(const TimeSeries& target, const TimeSeries& reference,
                                        const ReviewerMarks& marks, const LabelConfig& cfg = {},
                                        double win_sec = 5.0);

}  // namespace edaqa
