#pragma once

#include <Eigen/Core>

#include <cstddef>

#include "edaqa/error.hpp"
#include "edaqa/signal.hpp"

namespace edaqa {

/// Hamming-windowed sinc lowpass, odd length, normalised to unit DC gain.
/// `cutoff_hz` is the -6 dB point.
Vec design_lowpass(double cutoff_hz, double fs, int taps);

/// Zero-phase amplitude response of a symmetric odd-length FIR at f Hz.
double zero_phase_response(const Eigen::Ref<const Vec>& taps, double f, double fs);

/// Whole-sample symmetric reflection about the record ends (no edge repeat).
inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  const Eigen::Index period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Applies a symmetric FIR centred on sample `center` (zero group delay),
/// reflecting past the record ends. Works for real and complex inputs.
template <typename Derived>
typename Derived::Scalar fir_at(const Eigen::MatrixBase<Derived>& x,
                                const Eigen::Ref<const Vec>& taps, Eigen::Index center) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  const Eigen::Index half = taps.size() / 2;
  Scalar acc(0);
  if (center - half >= 0 && center + half < n) {
    for (Eigen::Index j = 0; j < taps.size(); ++j) acc += taps(j) * x(center + half - j);
  } else {
    for (Eigen::Index j = 0; j < taps.size(); ++j) acc += taps(j) * x(reflect_index(center + half - j, n));
  }
  return acc;
}

/// Centred (non-causal) FIR filtering of a whole record; output has the input
/// length and no phase shift for symmetric taps.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> filter_centered(
    const Eigen::MatrixBase<Derived>& x, const Eigen::Ref<const Vec>& taps) {
  if (taps.size() % 2 == 0) throw RejectedInput("filter_centered: FIR length must be odd");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> y(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) y(k) = fir_at(x, taps, k);
  return y;
}

}  // namespace edaqa
