#pragma once

#include <array>
#include <string>
#include <string_view>

#include "edaqa/labeling.hpp"
#include "edaqa/signal.hpp"
#include "edaqa/vfcdm.hpp"

namespace edaqa {

/// AR(2) fit, convention x[t] = a1 x[t-1] + a2 x[t-2] + e[t].
struct ArFit {
  double a1 = 0.0;
  double a2 = 0.0;
  double noise_var = 0.0;

  /// Spectral radius of the companion matrix; < 1 for a stationary fit.
  double spectral_radius() const;
};

/// Three-level orthonormal Haar analysis of one window.
struct WaveletBands {
  Vec cd1, cd2, cd3, ca3;
};

inline constexpr int kFeatureCount = 52;
inline constexpr int kFeatureMapVersion = 1;

/// Canonical feature names, 0-based here; the 1-based index map is
///   1-3 AR, 4-9 raw stats, 10-19 derivatives, 20-43 wavelet, 44-52 VFCDM.
const std::array<std::string_view, kFeatureCount>& feature_names();
int feature_index(std::string_view name);

struct FeatureVector {
  Eigen::Matrix<double, kFeatureCount, 1> values = Eigen::Matrix<double, kFeatureCount, 1>::Zero();
  QualityLabel label = QualityLabel::Clean;
  std::string subject_id;
  std::size_t window_index = 0;
};

/// Yule-Walker AR(2) on the mean-removed samples with biased autocorrelations.
/// Zero-variance input gives (0, 0, 0).
ArFit fit_ar2(const Eigen::Ref<const Vec>& samples);

WaveletBands haar_dwt3(const Eigen::Ref<const Vec>& samples);

/// mean, median, variance, entropy, range, #(>0) for cd1, cd2, cd3, ca3.
Eigen::Matrix<double, 24, 1> wavelet_features(const WaveletBands& bands, int n_bins = kDefaultEntropyBins);

/// For d1 then d2: mean, variance, max|d|, min|d|, mean|d|.
Eigen::Matrix<double, 10, 1> derivative_features(const Window& window);

FeatureVector assemble(const Window& window, const Eigen::Ref<const Vec>& low_slice,
                       const Eigen::Ref<const Vec>& high_slice, QualityLabel label,
                       int n_bins = kDefaultEntropyBins);

}  // namespace edaqa
