#pragma once

#include <string>
#include <vector>

#include "edaqa/signal.hpp"

namespace edaqa {

/// One band-limited component of a complex-demodulation decomposition.
struct BandComponent {
  int band_index = 1;  // 1-based
  double low_hz = 0.0;
  double high_hz = 0.0;
  double center_hz = 0.0;
  Vec samples;
};

struct Decomposition {
  std::string source_id;
  double fs = 8.0;
  int taps = 0;
  std::vector<BandComponent> components;

  int n_bands() const { return static_cast<int>(components.size()); }
  Eigen::Index length() const { return components.empty() ? 0 : components.front().samples.size(); }
};

/// Mean/variance/range of the low-mode (1-3) and high-mode (4-12) slices plus
/// their ratios. Order here is the order used in the feature vector.
struct VfcdmFeatures {
  double mean_low = 0.0;
  double var_low = 0.0;
  double range_low = 0.0;
  double mean_high = 0.0;
  double var_high = 0.0;
  double range_high = 0.0;
  double var_ratio = 0.0;
  double mean_ratio = 0.0;
  double range_ratio = 0.0;
};

inline constexpr int kDefaultBands = 12;
inline constexpr int kLowModeCount = 3;
inline constexpr double kRatioEpsilon = 1e-12;

/// Lowpass length used by cdm_decompose: 16*fs + 1 (129 taps at 8 Hz).
int cdm_taps(double fs);

/// Fixed-band complex demodulation. Band 1 is a direct lowpass at B = (fs/2)/n;
/// band i >= 2 is 2 Re{LPF_{B/2}(x e^{-j w_i t}) e^{+j w_i t}} with centre
/// (i-1)B + B/2. All filters are centred symmetric FIRs (zero phase).
Decomposition cdm_decompose(const TimeSeries& ts, int n_bands = kDefaultBands, int taps = 0);

/// Pointwise sum of the selected 1-based band indices.
TimeSeries reconstruct(const Decomposition& d, const std::vector<int>& modes);

std::vector<int> low_modes(int n_bands = kDefaultBands);
std::vector<int> high_modes(int n_bands = kDefaultBands);

/// Per-band energy over [margin, n - margin).
Vec band_energies(const Decomposition& d, Eigen::Index margin);

/// 1-based index of the most energetic band over the interior. Energies within
/// a relative 1e-3 of each other count as tied; ties go to the higher band,
/// matching the half-open [low, high) band convention at a shared edge.
int dominant_band(const Decomposition& d, Eigen::Index margin);

VfcdmFeatures vfcdm_features(const Eigen::Ref<const Vec>& low_win, const Eigen::Ref<const Vec>& high_win);

/// Writes `t,band_01..band_NN`.
void write_components_csv(const Decomposition& d, const std::string& path);

}  // namespace edaqa
