#include "edaqa/vfcdm.hpp"

#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "edaqa/filter.hpp"

namespace edaqa {

int cdm_taps(double fs) {
  const auto half = static_cast<int>(std::llround(8.0 * fs));
  return 2 * std::max(half, 1) + 1;
}

Decomposition cdm_decompose(const TimeSeries& ts, int n_bands, int taps) {
  if (n_bands < 2) throw RejectedInput("cdm_decompose: need at least 2 bands");
  if (taps == 0) taps = cdm_taps(ts.fs);
  if (taps % 2 == 0) throw RejectedInput("cdm_decompose: filter length must be odd");
  if (ts.samples.size() < 4 * static_cast<Eigen::Index>(taps)) {
    throw RejectedInput("cdm_decompose: record of " + std::to_string(ts.samples.size()) +
                        " samples is shorter than 4x the filter length (" + std::to_string(taps) + ")");
  }
  const double band = ts.fs / 2.0 / n_bands;
  const Vec lp_full = design_lowpass(band, ts.fs, taps);
  const Vec lp_half = design_lowpass(band / 2.0, ts.fs, taps);
  const Eigen::Index n = ts.samples.size();

  Decomposition d;
  d.source_id = ts.subject_id + "/" + to_string(ts.channel);
  d.fs = ts.fs;
  d.taps = taps;
  d.components.resize(static_cast<std::size_t>(n_bands));
  for (int i = 1; i <= n_bands; ++i) {
    BandComponent& c = d.components[static_cast<std::size_t>(i - 1)];
    c.band_index = i;
    c.low_hz = (i - 1) * band;
    c.high_hz = i * band;
    if (i == 1) {
      c.center_hz = 0.0;
      c.samples = filter_centered(ts.samples, lp_full);
      continue;
    }
    c.center_hz = (i - 1) * band + band / 2.0;
    const double w = 2.0 * std::numbers::pi * c.center_hz / ts.fs;
    Eigen::VectorXcd carrier(n);
    for (Eigen::Index k = 0; k < n; ++k) carrier(k) = std::polar(1.0, w * static_cast<double>(k));
    const Eigen::VectorXcd demod = ts.samples.cast<std::complex<double>>().cwiseProduct(carrier.conjugate());
    const Eigen::VectorXcd base = filter_centered(demod, lp_half);
    c.samples = 2.0 * base.cwiseProduct(carrier).real();
  }
  return d;
}

TimeSeries reconstruct(const Decomposition& d, const std::vector<int>& modes) {
  if (modes.empty()) throw RejectedInput("reconstruct: empty mode set");
  std::set<int> seen;
  for (int m : modes) {
    if (m < 1 || m > d.n_bands()) throw RejectedInput("reconstruct: mode index out of range");
    if (!seen.insert(m).second) throw RejectedInput("reconstruct: duplicate mode index");
  }
  TimeSeries out;
  out.fs = d.fs;
  out.samples = Vec::Zero(d.length());
  for (int m : seen) out.samples += d.components[static_cast<std::size_t>(m - 1)].samples;
  return out;
}

std::vector<int> low_modes(int n_bands) {
  std::vector<int> v;
  for (int i = 1; i <= std::min(kLowModeCount, n_bands); ++i) v.push_back(i);
  return v;
}

std::vector<int> high_modes(int n_bands) {
  std::vector<int> v;
  for (int i = kLowModeCount + 1; i <= n_bands; ++i) v.push_back(i);
  return v;
}

Vec band_energies(const Decomposition& d, Eigen::Index margin) {
  const Eigen::Index n = d.length();
  if (2 * margin >= n) throw RejectedInput("band_energies: margin leaves no interior");
  Vec e(d.n_bands());
  for (int i = 0; i < d.n_bands(); ++i) {
    e(i) = d.components[static_cast<std::size_t>(i)].samples.segment(margin, n - 2 * margin).squaredNorm();
  }
  return e;
}

int dominant_band(const Decomposition& d, Eigen::Index margin) {
  const Vec e = band_energies(d, margin);
  int best = 0;
  for (int i = 1; i < e.size(); ++i) {
    if (e(i) >= e(best) * (1.0 - 1e-3)) best = i;
  }
  return best + 1;
}

VfcdmFeatures vfcdm_features(const Eigen::Ref<const Vec>& low_win, const Eigen::Ref<const Vec>& high_win) {
  if (low_win.size() != high_win.size()) throw RejectedInput("vfcdm_features: slice length mismatch");
  if (low_win.size() == 0) throw RejectedInput("vfcdm_features: empty slices");
  VfcdmFeatures f;
  f.mean_low = low_win.mean();
  f.var_low = population_variance(low_win);
  f.range_low = value_range(low_win);
  f.mean_high = high_win.mean();
  f.var_high = population_variance(high_win);
  f.range_high = value_range(high_win);
  f.var_ratio = f.var_low / (f.var_high + kRatioEpsilon);
  f.mean_ratio = f.mean_low / (std::abs(f.mean_high) + kRatioEpsilon);
  f.range_ratio = f.range_low / (f.range_high + kRatioEpsilon);
  return f;
}

void write_components_csv(const Decomposition& d, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "t";
  char buf[64];
  for (int i = 1; i <= d.n_bands(); ++i) {
    std::snprintf(buf, sizeof buf, ",band_%02d", i);
    os << buf;
  }
  os << '\n';
  for (Eigen::Index k = 0; k < d.length(); ++k) {
    std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(k) / d.fs);
    os << buf;
    for (const auto& c : d.components) {
      std::snprintf(buf, sizeof buf, ",%.10g", c.samples(k));
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace edaqa
