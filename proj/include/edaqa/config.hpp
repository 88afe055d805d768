#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "edaqa/baseline.hpp"
#include "edaqa/labeling.hpp"
#include "edaqa/model_selection.hpp"
#include "edaqa/synthgen.hpp"

namespace edaqa {

struct FeatureOptions {
  double analysis_fs = 8.0;
  double win_sec = 5.0;
  int entropy_bins = kDefaultEntropyBins;
  int n_bands = 12;
  int cdm_taps = 0;  // 0 -> 16 * fs + 1
};

/// Everything a run depends on. `seed` is the master seed; it overrides the
/// per-module seeds when loaded.
struct RunConfig {
  std::uint64_t seed = 1;
  LabelConfig label;
  FeatureOptions features;
  PipelineConfig ml;
  RuleConfig baseline;
  SynthConfig synth;
  bool has_synth = false;  // config file carried a "synth" section
  int threads = 1;

  void set_seed(std::uint64_t s);
};

nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; wrongly typed values throw RejectedInput.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Named synthetic-corpus configurations: "clean", "medium", "easy",
/// "spikes". Throws RejectedInput for unknown names.
RunConfig preset_config(const std::string& name);

/// 16-hex-digit FNV-1a hash of the canonical JSON form, minus `threads`.
std::string config_hash(const RunConfig& cfg);

/// Stamp embedded in every output file.
struct Provenance {
  std::string tool_version;
  std::string config_hash;
  std::uint64_t seed = 0;
  int feature_map_version = 0;

  static Provenance of(const RunConfig& cfg);
  std::string csv_comment() const;  // "# edaqa 0.1.0 config_hash=... seed=... feature_map=1"
  nlohmann::json to_json() const;
};

}  // namespace edaqa
