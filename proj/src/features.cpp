#include "edaqa/features.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace edaqa {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "ar_a1", "ar_a2", "ar_noise_var",
    "raw_mean", "raw_median", "raw_variance", "raw_entropy", "raw_range", "raw_skewness",
    "d1_mean", "d1_variance", "d1_abs_max", "d1_abs_min", "d1_abs_mean",
    "d2_mean", "d2_variance", "d2_abs_max", "d2_abs_min", "d2_abs_mean",
    "cd1_mean", "cd1_median", "cd1_variance", "cd1_entropy", "cd1_range", "cd1_n_pos",
    "cd2_mean", "cd2_median", "cd2_variance", "cd2_entropy", "cd2_range", "cd2_n_pos",
    "cd3_mean", "cd3_median", "cd3_variance", "cd3_entropy", "cd3_range", "cd3_n_pos",
    "ca3_mean", "ca3_median", "ca3_variance", "ca3_entropy", "ca3_range", "ca3_n_pos",
    "vfcdm_low_mean", "vfcdm_low_variance", "vfcdm_low_range",
    "vfcdm_high_mean", "vfcdm_high_variance", "vfcdm_high_range",
    "vfcdm_variance_ratio", "vfcdm_mean_ratio", "vfcdm_range_ratio",
};

// One Haar level: approximations and details of pairs.
void haar_step(const Vec& x, Vec& approx, Vec& detail) {
  const Eigen::Index half = x.size() / 2;
  approx.resize(half);
  detail.resize(half);
  for (Eigen::Index k = 0; k < half; ++k) {
    approx(k) = (x(2 * k) + x(2 * k + 1)) / std::numbers::sqrt2;
    detail(k) = (x(2 * k) - x(2 * k + 1)) / std::numbers::sqrt2;
  }
}

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() { return kNames; }

int feature_index(std::string_view name) {
  for (int i = 0; i < kFeatureCount; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == name) return i;
  }
  return -1;
}

double ArFit::spectral_radius() const {
  Eigen::Matrix2d companion;
  companion << a1, a2, 1.0, 0.0;
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}

ArFit fit_ar2(const Eigen::Ref<const Vec>& samples) {
  const Eigen::Index n = samples.size();
  if (n < 8) throw RejectedInput("fit_ar2: need at least 8 samples");
  const Vec x = samples.array() - samples.mean();
  const double nn = static_cast<double>(n);
  const double r0 = x.squaredNorm() / nn;
  if (r0 <= 1e-300) return {};
  const double r1 = x.head(n - 1).dot(x.tail(n - 1)) / nn;
  const double r2 = x.head(n - 2).dot(x.tail(n - 2)) / nn;
  // Biased autocorrelations keep the Toeplitz system positive definite.
  const double det = r0 * r0 - r1 * r1;
  ArFit fit;
  if (det <= 1e-300 * r0 * r0) return fit;
  fit.a1 = (r1 * r0 - r1 * r2) / det;
  fit.a2 = (r0 * r2 - r1 * r1) / det;
  fit.noise_var = std::max(0.0, r0 - fit.a1 * r1 - fit.a2 * r2);
  return fit;
}

WaveletBands haar_dwt3(const Eigen::Ref<const Vec>& samples) {
  if (samples.size() == 0 || samples.size() % 8 != 0) {
    throw RejectedInput("haar_dwt3: length must be a positive multiple of 8");
  }
  WaveletBands b;
  Vec a1, a2;
  haar_step(samples, a1, b.cd1);
  haar_step(a1, a2, b.cd2);
  haar_step(a2, b.ca3, b.cd3);
  return b;
}

Eigen::Matrix<double, 24, 1> wavelet_features(const WaveletBands& bands, int n_bins) {
  Eigen::Matrix<double, 24, 1> out;
  const Vec* order[] = {&bands.cd1, &bands.cd2, &bands.cd3, &bands.ca3};
  int k = 0;
  for (const Vec* v : order) {
    const StatBundle s = stats(*v, n_bins);
    out(k++) = s.mean;
    out(k++) = s.median;
    out(k++) = s.variance;
    out(k++) = s.shannon_entropy;
    out(k++) = s.range;
    out(k++) = static_cast<double>((v->array() > 0.0).count());
  }
  return out;
}

Eigen::Matrix<double, 10, 1> derivative_features(const Window& window) {
  if (window.samples.size() < 3) throw RejectedInput("derivative_features: window needs at least 3 samples");
  Eigen::Matrix<double, 10, 1> out;
  for (int order = 1; order <= 2; ++order) {
    const Vec d = derivative(window.samples, window.fs, order);
    const Eigen::ArrayXd a = d.array().abs();
    const int base = (order - 1) * 5;
    out(base + 0) = d.mean();
    out(base + 1) = population_variance(d);
    out(base + 2) = a.maxCoeff();
    out(base + 3) = a.minCoeff();
    out(base + 4) = a.mean();
  }
  return out;
}

FeatureVector assemble(const Window& window, const Eigen::Ref<const Vec>& low_slice,
                       const Eigen::Ref<const Vec>& high_slice, QualityLabel label, int n_bins) {
  if (low_slice.size() != window.samples.size() || high_slice.size() != window.samples.size()) {
    throw RejectedInput("assemble: VFCDM slices do not match the window length");
  }
  FeatureVector fv;
  fv.label = label;
  fv.subject_id = window.subject_id;
  fv.window_index = window.index;
  auto& v = fv.values;

  const ArFit ar = fit_ar2(window.samples);
  v.segment<3>(0) << ar.a1, ar.a2, ar.noise_var;

  const StatBundle raw = stats(window.samples, n_bins);
  v.segment<6>(3) << raw.mean, raw.median, raw.variance, raw.shannon_entropy, raw.range, raw.skewness;

  v.segment<10>(9) = derivative_features(window);
  v.segment<24>(19) = wavelet_features(haar_dwt3(window.samples), n_bins);

  const VfcdmFeatures vf = vfcdm_features(low_slice, high_slice);
  v.segment<9>(43) << vf.mean_low, vf.var_low, vf.range_low, vf.mean_high, vf.var_high, vf.range_high,
      vf.var_ratio, vf.mean_ratio, vf.range_ratio;

  for (int i = 0; i < kFeatureCount; ++i) {
    if (!std::isfinite(v(i))) {
      throw FeatureError(i, "feature " + std::to_string(i + 1) + " (" + std::string(kNames[static_cast<std::size_t>(i)]) +
                                ") is not finite for " + window.subject_id + " window " +
                                std::to_string(window.index));
    }
  }
  return fv;
}

}  // namespace edaqa
