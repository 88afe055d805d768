#include "edaqa/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "edaqa/parallel.hpp"

namespace edaqa {

std::string to_string(ArtifactType t) {
  switch (t) {
    case ArtifactType::Step: return "step";
    case ArtifactType::Spike: return "spike";
    case ArtifactType::Burst: return "burst";
    case ArtifactType::Saturation: return "saturation";
    case ArtifactType::DetachDecay: return "detach_decay";
  }
  return "?";
}

void SynthConfig::check() const {
  if (n_subjects < 1) throw RejectedInput("SynthConfig: n_subjects must be >= 1");
  if (!(fs > 0.0)) throw RejectedInput("SynthConfig: fs must be positive");
  if (duration_s < 50.0) throw RejectedInput("SynthConfig: duration must cover at least 10 windows (50 s)");
  const double rates[] = {scr_rate, artifacts.step, artifacts.spike, artifacts.burst, artifacts.saturation,
                          artifacts.detach, drift_scale, rate_heterogeneity, jitter_gain, jitter_noise,
                          jitter_delay};
  for (double r : rates) {
    if (!(r >= 0.0)) throw RejectedInput("SynthConfig: rates and jitter scales must be >= 0");
  }
  if (!(tonic_min > 0.0 && tonic_min <= tonic_max)) throw RejectedInput("SynthConfig: need 0 < tonic_min <= tonic_max");
  if (!(scr_tau_rise > 0.0 && scr_tau_decay > scr_tau_rise)) {
    throw RejectedInput("SynthConfig: need 0 < scr_tau_rise < scr_tau_decay");
  }
}

std::string subject_name(int subject_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "S%02d", subject_index + 1);
  return buf;
}

namespace {

struct Scr {
  double onset;
  double amp;
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
}

int poisson(std::mt19937_64& rng, double mean) {
  return mean > 0.0 ? std::poisson_distribution<int>(mean)(rng) : 0;
}

}  // namespace

SynthRecord gen_subject(const SynthConfig& cfg, int subject_index) {
  cfg.check();
  std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(subject_index)));
  const auto n = static_cast<Eigen::Index>(std::llround(cfg.duration_s * cfg.fs));
  const double dt = 1.0 / cfg.fs;
  const double minutes = cfg.duration_s / 60.0;

  // Tonic level: bounded integrated Ornstein-Uhlenbeck slope.
  const double level0 = uniform(rng, cfg.tonic_min, cfg.tonic_max);
  Vec tonic(n);
  {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sigma = cfg.drift_scale / 60.0;
    const double phi = std::exp(-dt / cfg.drift_corr_s);
    double slope = sigma * gauss(rng);
    double level = level0;
    for (Eigen::Index k = 0; k < n; ++k) {
      tonic(k) = level;
      slope = phi * slope + sigma * std::sqrt(1.0 - phi * phi) * gauss(rng);
      if (level < 0.5 * level0) slope = std::abs(slope);
      if (level > 1.5 * level0) slope = -std::abs(slope);
      level += slope * dt;
    }
  }

  std::vector<Scr> scrs(static_cast<std::size_t>(poisson(rng, cfg.scr_rate * minutes)));
  for (auto& s : scrs) {
    s.onset = uniform(rng, 0.0, cfg.duration_s);
    s.amp = uniform(rng, cfg.scr_amp_min, cfg.scr_amp_max);
  }
  std::sort(scrs.begin(), scrs.end(), [](const Scr& a, const Scr& b) { return a.onset < b.onset; });

  auto clean_at = [&](double t) {
    // Linear interpolation of the tonic sample grid plus analytic SCRs.
    const double pos = std::clamp(t * cfg.fs, 0.0, static_cast<double>(n - 1));
    const auto k = static_cast<Eigen::Index>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    double v = k + 1 < n ? tonic(k) * (1.0 - frac) + tonic(k + 1) * frac : tonic(k);
    for (const auto& s : scrs) {
      const double u = t - s.onset;
      if (u <= 0.0) break;
      v += s.amp * (std::exp(-u / cfg.scr_tau_decay) - std::exp(-u / cfg.scr_tau_rise));
    }
    return std::max(v, 0.0);
  };

  const std::string sid = subject_name(subject_index);
  SynthRecord rec;
  rec.target = TimeSeries{Vec(n), cfg.fs, sid, Channel::Target, 0.0};
  rec.reference = TimeSeries{Vec(n), cfg.fs, sid, Channel::Reference, 0.0};
  const double gain = 1.0 + uniform(rng, -cfg.jitter_gain, cfg.jitter_gain);
  const double delay = uniform(rng, -cfg.jitter_delay, cfg.jitter_delay);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    rec.target.samples(k) = clean_at(t);
    rec.reference.samples(k) = std::max(0.0, gain * clean_at(t + delay) + cfg.jitter_noise * noise(rng));
  }

  // Per-subject artifact mix.
  std::normal_distribution<double> lognorm(0.0, cfg.rate_heterogeneity);
  auto subject_rate = [&](double base) {
    const double m = cfg.rate_heterogeneity > 0.0 ? std::exp(lognorm(rng)) : 1.0;
    return base * m;
  };
  const ArtifactType order[] = {ArtifactType::Step, ArtifactType::Spike, ArtifactType::Burst,
                                ArtifactType::DetachDecay, ArtifactType::Saturation};
  const double base_rates[] = {cfg.artifacts.step, cfg.artifacts.spike, cfg.artifacts.burst, cfg.artifacts.detach,
                               cfg.artifacts.saturation};
  for (int a = 0; a < 5; ++a) {
    const int count = poisson(rng, subject_rate(base_rates[a]) * minutes);
    for (int e = 0; e < count; ++e) {
      ArtifactEvent ev;
      ev.type = order[a];
      const double sign = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      switch (ev.type) {
        case ArtifactType::Step:
          ev.duration = uniform(rng, 1.0, 4.0);
          ev.magnitude = sign * uniform(rng, cfg.step_min, cfg.step_max);
          break;
        case ArtifactType::Spike:
          ev.duration = static_cast<double>(std::uniform_int_distribution<int>(1, 3)(rng)) * dt;
          ev.magnitude = sign * uniform(rng, cfg.spike_min, cfg.spike_max);
          break;
        case ArtifactType::Burst:
          ev.duration = uniform(rng, 2.0, 10.0);
          ev.magnitude = uniform(rng, cfg.burst_min, cfg.burst_max);
          break;
        case ArtifactType::DetachDecay:
          ev.duration = uniform(rng, 2.0, 8.0);
          ev.magnitude = uniform(rng, 0.5, 2.0);  // decay time constant, s
          break;
        case ArtifactType::Saturation:
          ev.duration = uniform(rng, 1.0, 5.0);
          ev.magnitude = cfg.saturation_level;
          break;
      }
      ev.onset = uniform(rng, 0.0, std::max(0.0, cfg.duration_s - ev.duration));
      const double burst_hz = ev.type == ArtifactType::Burst ? uniform(rng, 1.0, 3.5) : 0.0;
      const double burst_phase = ev.type == ArtifactType::Burst ? uniform(rng, 0.0, 2.0 * std::numbers::pi) : 0.0;
      rec.events.push_back(ev);
      const auto first = static_cast<Eigen::Index>(std::ceil(ev.onset * cfg.fs - 1e-9));
      const auto last = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(std::ceil((ev.onset + ev.duration) * cfg.fs - 1e-9)));
      for (Eigen::Index k = first; k < last; ++k) {
        const double u = static_cast<double>(k) * dt - ev.onset;
        double& x = rec.target.samples(k);
        switch (ev.type) {
          case ArtifactType::Step:
          case ArtifactType::Spike: x += ev.magnitude; break;
          case ArtifactType::Burst: x += ev.magnitude * std::sin(2.0 * std::numbers::pi * burst_hz * u + burst_phase); break;
          case ArtifactType::DetachDecay: x *= std::exp(-u / ev.magnitude); break;
          case ArtifactType::Saturation: x = ev.magnitude; break;
        }
      }
    }
  }
  rec.artifact_mask.assign(static_cast<std::size_t>(n), false);
  for (const auto& ev : rec.events) {
    const auto first = static_cast<Eigen::Index>(std::ceil(ev.onset * cfg.fs - 1e-9));
    const auto last = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(std::ceil((ev.onset + ev.duration) * cfg.fs - 1e-9)));
    for (Eigen::Index k = first; k < last; ++k) rec.artifact_mask[static_cast<std::size_t>(k)] = true;
  }
  rec.target.samples = rec.target.samples.cwiseMax(0.0);
  return rec;
}

std::vector<QualityLabel> mask_to_truth_labels(const SynthRecord& record, double win_sec, double frac) {
  const auto windows = segment(record.target, win_sec);
  if (record.artifact_mask.size() != static_cast<std::size_t>(record.target.samples.size())) {
    throw RejectedInput("mask_to_truth_labels: mask is not aligned with the target channel");
  }
  std::vector<QualityLabel> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    const auto len = static_cast<std::size_t>(w.samples.size());
    const std::size_t first = w.index * len;
    std::size_t masked = 0;
    for (std::size_t k = first; k < first + len; ++k) masked += record.artifact_mask[k] ? 1 : 0;
    out.push_back(static_cast<double>(masked) > frac * static_cast<double>(len) ? QualityLabel::Noisy
                                                                                   : QualityLabel::Clean);
  }
  return out;
}

}  // namespace edaqa
