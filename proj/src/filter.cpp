#include "edaqa/filter.hpp"

#include <cmath>
#include <numbers>

namespace edaqa {

Vec design_lowpass(double cutoff_hz, double fs, int taps) {
  if (taps < 3 || taps % 2 == 0) throw RejectedInput("design_lowpass: taps must be odd and >= 3");
  if (!(fs > 0.0) || !(cutoff_hz > 0.0) || cutoff_hz >= fs / 2.0) {
    throw RejectedInput("design_lowpass: cutoff must lie in (0, fs/2)");
  }
  const double pi = std::numbers::pi;
  const double fc = cutoff_hz / fs;  // cycles per sample
  const int mid = taps / 2;
  Vec h(taps);
  for (int n = 0; n <= mid; ++n) {
    const int m = n - mid;
    const double sinc = m == 0 ? 2.0 * fc : std::sin(2.0 * pi * fc * m) / (pi * m);
    const double w = 0.54 - 0.46 * std::cos(2.0 * pi * n / (taps - 1));
    h(n) = sinc * w;
    h(taps - 1 - n) = h(n);
  }
  h /= h.sum();
  return h;
}

double zero_phase_response(const Eigen::Ref<const Vec>& taps, double f, double fs) {
  const Eigen::Index mid = taps.size() / 2;
  double acc = 0.0;
  for (Eigen::Index n = 0; n < taps.size(); ++n) {
    acc += taps(n) * std::cos(2.0 * std::numbers::pi * f * static_cast<double>(n - mid) / fs);
  }
  return acc;
}

}  // namespace edaqa
