#pragma once

#include <limits>
#include <vector>

#include "edaqa/labeling.hpp"
#include "edaqa/signal.hpp"

namespace edaqa {

/// Sample-level screening thresholds of the rule-based comparator.
struct RuleConfig {
  double eda_min = 0.05;         // uS
  double eda_max = 60.0;         // uS
  double max_slope = 10.0;       // uS/s
  double dilation_radius = 5.0;  // s

  void check() const;
};

using SampleMask = std::vector<bool>;

/// Invalid where out of [eda_min, eda_max] or where the first difference
/// times fs exceeds max_slope in magnitude (both endpoints of the step), then
/// dilated by dilation_radius on each side.
SampleMask rule_mask(const TimeSeries& ts, const RuleConfig& cfg = {});

/// Noisy if any sample of the window is invalid; never Discarded.
/// `mask` is the whole-record mask; the window is located by its start time.
QualityLabel rule_label(const Window& window, const SampleMask& mask, double record_t0 = 0.0);

/// Per-window rule labels for a whole record (window order).
std::vector<QualityLabel> rule_labels(const TimeSeries& ts, const RuleConfig& cfg = {}, double win_sec = 5.0);

}  // namespace edaqa
