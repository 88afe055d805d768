#include "edaqa/signal.hpp"

#include <cmath>
#include <sstream>

#include "edaqa/filter.hpp"

namespace edaqa {

std::string to_string(Channel c) { return c == Channel::Target ? "target" : "reference"; }

Channel channel_from_string(const std::string& s) {
  if (s == "target") return Channel::Target;
  if (s == "reference") return Channel::Reference;
  throw RejectedInput("unknown channel '" + s + "' (expected target|reference)");
}

void validate(const TimeSeries& ts) {
  if (!(ts.fs > 0.0) || !std::isfinite(ts.fs)) throw RejectedInput("sampling rate must be positive");
  std::ostringstream bad;
  int n_bad = 0;
  for (Eigen::Index i = 0; i < ts.samples.size(); ++i) {
    if (std::isfinite(ts.samples(i))) continue;
    if (n_bad < 20) bad << (n_bad ? "," : "") << i;
    ++n_bad;
  }
  if (n_bad > 0) {
    std::ostringstream msg;
    msg << "non-finite samples in " << ts.subject_id << "/" << to_string(ts.channel) << " at indices "
        << bad.str() << (n_bad > 20 ? ",..." : "") << " (" << n_bad << " total)";
    throw RejectedInput(msg.str());
  }
}

int decimation_taps(int factor) {
  // Hamming transition width is ~3.3 fs/N; keep it within 0.1 * target_fs so
  // the band [0.4, 0.5] * target_fs holds the whole transition.
  const int half = (33 * factor + 1) / 2;
  return 2 * half + 1;
}

TimeSeries decimate(const TimeSeries& ts, double target_fs) {
  if (!(target_fs > 0.0)) throw RejectedInput("decimate: target_fs must be positive");
  const double ratio = ts.fs / target_fs;
  const auto factor = static_cast<int>(std::llround(ratio));
  if (factor < 1 || std::abs(ratio - factor) > 1e-9 * ratio) {
    throw RejectedInput("decimate: fs must be an integer multiple of target_fs");
  }
  TimeSeries out{Vec(), target_fs, ts.subject_id, ts.channel, ts.t0};
  if (factor == 1) {
    out.samples = ts.samples;
    return out;
  }
  const int taps = decimation_taps(factor);
  if (ts.samples.size() <= taps) {
    throw RejectedInput("decimate: record (" + std::to_string(ts.samples.size()) +
                        " samples) shorter than anti-alias filter (" + std::to_string(taps) + " taps)");
  }
  const Vec h = design_lowpass(0.45 * target_fs, ts.fs, taps);
  const Eigen::Index n_out = (ts.samples.size() + factor - 1) / factor;
  out.samples.resize(n_out);
  for (Eigen::Index k = 0; k < n_out; ++k) out.samples(k) = fir_at(ts.samples, h, k * factor);
  return out;
}

std::vector<Window> segment(const TimeSeries& ts, double win_sec) {
  const double exact = ts.fs * win_sec;
  const auto win_n = static_cast<Eigen::Index>(std::llround(exact));
  if (win_n < 1 || std::abs(exact - static_cast<double>(win_n)) > 1e-9) {
    throw RejectedInput("segment: fs * win_sec must be a positive integer");
  }
  std::vector<Window> out;
  const Eigen::Index count = ts.samples.size() / win_n;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index w = 0; w < count; ++w) {
    out.push_back(Window{ts.subject_id, static_cast<std::size_t>(w), ts.samples.segment(w * win_n, win_n), ts.fs,
                         ts.t0 + static_cast<double>(w) * win_sec});
  }
  return out;
}

Vec derivative(const Eigen::Ref<const Vec>& samples, double fs, int order) {
  if (order != 1 && order != 2) throw RejectedInput("derivative: order must be 1 or 2");
  const Eigen::Index n = samples.size();
  if (n < order + 1) throw RejectedInput("derivative: need at least order+1 samples");
  Vec d1 = (samples.tail(n - 1) - samples.head(n - 1)) * fs;
  if (order == 1) return d1;
  return (d1.tail(n - 2) - d1.head(n - 2)) * fs;
}

double median(const Eigen::Ref<const Vec>& x) {
  if (x.size() == 0) throw RejectedInput("median: empty input");
  std::vector<double> v(x.data(), x.data() + x.size());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

StatBundle stats(const Eigen::Ref<const Vec>& samples, int n_bins) {
  if (samples.size() == 0) throw RejectedInput("stats: empty input");
  StatBundle s;
  s.mean = samples.mean();
  s.median = median(samples);
  const Eigen::ArrayXd centered = samples.array() - s.mean;
  const double m2 = centered.square().mean();
  const double m3 = centered.cube().mean();
  s.variance = m2;
  s.range = value_range(samples);
  s.skewness = (s.range > 0.0 && m2 > 1e-300) ? m3 / std::pow(m2, 1.5) : 0.0;
  s.shannon_entropy = histogram_entropy(samples, n_bins);
  return s;
}

}  // namespace edaqa
