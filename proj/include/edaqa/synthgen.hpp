#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edaqa/labeling.hpp"
#include "edaqa/signal.hpp"

namespace edaqa {

enum class ArtifactType { Step, Spike, Burst, Saturation, DetachDecay };

std::string to_string(ArtifactType t);

/// Events per minute for each artifact family.
struct ArtifactRates {
  double step = 0.0;
  double spike = 0.0;
  double burst = 0.0;
  double saturation = 0.0;
  double detach = 0.0;
};

struct SynthConfig {
  int n_subjects = 10;
  double duration_s = 600.0;
  double fs = 8.0;

  double tonic_min = 2.0;    // uS
  double tonic_max = 10.0;   // uS
  double drift_scale = 0.5;  // uS/min, std of the tonic slope
  double drift_corr_s = 30.0;

  double scr_rate = 4.0;  // events/min
  double scr_amp_min = 0.1;
  double scr_amp_max = 1.0;
  double scr_tau_rise = 0.75;
  double scr_tau_decay = 2.0;

  ArtifactRates artifacts;
  double rate_heterogeneity = 0.0;  // lognormal sigma of per-subject rate multipliers
  double step_min = 0.5, step_max = 5.0;     // uS
  double spike_min = 1.0, spike_max = 10.0;  // uS
  double burst_min = 0.2, burst_max = 2.0;   // uS amplitude
  double saturation_level = 60.0;            // uS

  double jitter_gain = 0.02;     // relative amplitude mismatch between hands
  double jitter_noise = 0.0002;  // uS white noise on the reference
  double jitter_delay = 0.05;    // s, max timing offset between hands

  std::uint64_t seed = 1;

  void check() const;
};

struct ArtifactEvent {
  ArtifactType type = ArtifactType::Spike;
  double onset = 0.0;     // s
  double duration = 0.0;  // s
  double magnitude = 0.0;
};

struct SynthRecord {
  TimeSeries reference;
  TimeSeries target;
  std::vector<bool> artifact_mask;  // per target sample
  std::vector<ArtifactEvent> events;
};

std::string subject_name(int subject_index);

/// Generates one subject's paired channels. Seeded by (cfg.seed, subject_index).
SynthRecord gen_subject(const SynthConfig& cfg, int subject_index);

/// Noisy iff more than `frac` of the window's samples are masked.
std::vector<QualityLabel> mask_to_truth_labels(const SynthRecord& record, double win_sec = 5.0, double frac = 0.05);

}  // namespace edaqa
