#include "edaqa/baseline.hpp"

#include <cmath>

namespace edaqa {

void RuleConfig::check() const {
  if (!(eda_min < eda_max)) throw RejectedInput("RuleConfig: eda_min must be below eda_max");
  if (!(max_slope > 0.0)) throw RejectedInput("RuleConfig: max_slope must be positive");
  if (!(dilation_radius >= 0.0)) throw RejectedInput("RuleConfig: dilation_radius must be >= 0");
}

SampleMask rule_mask(const TimeSeries& ts, const RuleConfig& cfg) {
  cfg.check();
  const auto n = static_cast<std::size_t>(ts.samples.size());
  SampleMask raw(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = ts.samples(static_cast<Eigen::Index>(k));
    if (v < cfg.eda_min || v > cfg.eda_max) raw[k] = true;
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double slope = (ts.samples(static_cast<Eigen::Index>(k + 1)) - ts.samples(static_cast<Eigen::Index>(k))) * ts.fs;
    if (std::abs(slope) > cfg.max_slope) raw[k] = raw[k + 1] = true;
  }
  const double r = std::round(cfg.dilation_radius * ts.fs);
  const std::size_t radius = std::isfinite(r) ? static_cast<std::size_t>(std::min(r, static_cast<double>(n))) : n;
  if (radius == 0) return raw;
  // Sweep with the distance to the nearest invalid sample on either side.
  SampleMask out(n, false);
  std::size_t since = radius + 1;
  for (std::size_t k = 0; k < n; ++k) {
    since = raw[k] ? 0 : (since <= radius ? since + 1 : since);
    if (since <= radius) out[k] = true;
  }
  since = radius + 1;
  for (std::size_t k = n; k-- > 0;) {
    since = raw[k] ? 0 : (since <= radius ? since + 1 : since);
    if (since <= radius) out[k] = true;
  }
  return out;
}

QualityLabel rule_label(const Window& window, const SampleMask& mask, double record_t0) {
  const double start = (window.start_time - record_t0) * window.fs;
  const auto first = static_cast<long long>(std::llround(start));
  if (first < 0 || std::abs(start - static_cast<double>(first)) > 1e-6 ||
      static_cast<std::size_t>(first) + static_cast<std::size_t>(window.samples.size()) > mask.size()) {
    throw RejectedInput("rule_label: mask is not aligned with the window");
  }
  for (Eigen::Index k = 0; k < window.samples.size(); ++k) {
    if (mask[static_cast<std::size_t>(first + k)]) return QualityLabel::Noisy;
  }
  return QualityLabel::Clean;
}

std::vector<QualityLabel> rule_labels(const TimeSeries& ts, const RuleConfig& cfg, double win_sec) {
  const SampleMask mask = rule_mask(ts, cfg);
  std::vector<QualityLabel> out;
  for (const auto& w : segment(ts, win_sec)) out.push_back(rule_label(w, mask, ts.t0));
  return out;
}

}  // namespace edaqa
