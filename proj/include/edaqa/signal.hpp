#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "edaqa/error.hpp"

namespace edaqa {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Channel { Target, Reference };

std::string to_string(Channel c);
Channel channel_from_string(const std::string& s);

/// Uniformly sampled EDA channel in microsiemens. Sample k sits at t0 + k/fs.
struct TimeSeries {
  Vec samples;
  double fs = 8.0;
  std::string subject_id;
  Channel channel = Channel::Target;
  double t0 = 0.0;

  Eigen::Index size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / fs; }
};

/// Throws RejectedInput listing the offending indices if any sample is NaN or
/// infinite, or if fs is not positive.
void validate(const TimeSeries& ts);

/// One non-overlapping analysis window cut from a record.
struct Window {
  std::string subject_id;
  std::size_t index = 0;
  Vec samples;
  double fs = 8.0;
  double start_time = 0.0;

  double end_time() const { return start_time + static_cast<double>(samples.size()) / fs; }
};

struct StatBundle {
  double mean = 0.0;
  double median = 0.0;
  double variance = 0.0;
  double range = 0.0;
  double skewness = 0.0;
  double shannon_entropy = 0.0;
};

inline constexpr int kDefaultEntropyBins = 16;

/// Anti-aliased integer-factor decimation with a linear-phase FIR applied
/// centred on each output sample (zero net delay). Output sample k
/// corresponds to input sample k*M.
TimeSeries decimate(const TimeSeries& ts, double target_fs);

/// Number of taps used by decimate for integer factor M.
int decimation_taps(int factor);

/// Cuts floor(duration/win_sec) contiguous windows; the trailing partial
/// window is dropped.
std::vector<Window> segment(const TimeSeries& ts, double win_sec = 5.0);

/// Scaled forward difference: order 1 gives (x[k+1]-x[k])*fs (length n-1),
/// order 2 differences that again (length n-2).
Vec derivative(const Eigen::Ref<const Vec>& samples, double fs, int order);

double median(const Eigen::Ref<const Vec>& x);

/// Shannon entropy (bits) of an equal-width histogram over [min, max].
/// Constant input has zero entropy.
template <typename Derived>
double histogram_entropy(const Eigen::MatrixBase<Derived>& x, int n_bins = kDefaultEntropyBins) {
  const Eigen::Index n = x.size();
  if (n == 0) throw RejectedInput("histogram_entropy: empty input");
  if (n_bins < 1) throw RejectedInput("histogram_entropy: n_bins must be >= 1");
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  const double width = hi - lo;
  if (!(width > 0.0)) return 0.0;
  std::vector<int> counts(static_cast<std::size_t>(n_bins), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto bin = static_cast<int>(std::floor(n_bins * ((x(i) - lo) / width)));
    bin = std::clamp(bin, 0, n_bins - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  double h = 0.0;
  for (int c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

/// Mean, median, population variance, range, moment skewness and histogram
/// entropy of a sample.
StatBundle stats(const Eigen::Ref<const Vec>& samples, int n_bins = kDefaultEntropyBins);

/// Population variance (divide by n).
template <typename Derived>
double population_variance(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) return 0.0;
  const double m = x.mean();
  return (x.array() - m).square().mean();
}

template <typename Derived>
double value_range(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) return 0.0;
  return x.maxCoeff() - x.minCoeff();
}

}  // namespace edaqa
