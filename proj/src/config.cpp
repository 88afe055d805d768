#include "edaqa/config.hpp"

#include <cstdio>
#include <fstream>

#include "edaqa/features.hpp"

namespace edaqa {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw RejectedInput(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw RejectedInput(std::string("config: '") + key + "' must be an object");
  return j.at(key);
}

}  // namespace

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  ml.seed = s;
  synth.seed = s;
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["label"] = {{"clean_threshold", c.label.clean_threshold},
                {"override_threshold", c.label.override_threshold},
                {"zero_var_epsilon", c.label.zero_var_epsilon}};
  j["features"] = {{"analysis_fs", c.features.analysis_fs},
                   {"win_sec", c.features.win_sec},
                   {"entropy_bins", c.features.entropy_bins},
                   {"n_bands", c.features.n_bands},
                   {"cdm_taps", c.features.cdm_taps}};
  j["ml"] = {{"classifier", to_string(c.ml.kind)},
             {"selection", c.ml.selection},
             {"k_grid", c.ml.k_grid},
             {"C_grid", c.ml.C_grid},
             {"gamma_grid", c.ml.gamma_grid},
             {"knn_grid", c.ml.knn_grid},
             {"rf_max_features_grid", c.ml.rf_max_features_grid},
             {"rf_trees", c.ml.rf_trees},
             {"selection_trees", c.ml.selection_trees},
             {"group_folds", c.ml.group_folds},
             {"svm_tol", c.ml.svm_tol},
             {"selection_C", c.ml.selection_C}};
  j["baseline"] = {{"eda_min", c.baseline.eda_min},
                   {"eda_max", c.baseline.eda_max},
                   {"max_slope", c.baseline.max_slope},
                   {"dilation_radius", c.baseline.dilation_radius}};
  if (c.has_synth) {
    const SynthConfig& s = c.synth;
    j["synth"] = {{"n_subjects", s.n_subjects},
                  {"duration_s", s.duration_s},
                  {"fs", s.fs},
                  {"tonic_min", s.tonic_min},
                  {"tonic_max", s.tonic_max},
                  {"drift_scale", s.drift_scale},
                  {"drift_corr_s", s.drift_corr_s},
                  {"scr_rate", s.scr_rate},
                  {"scr_amp_min", s.scr_amp_min},
                  {"scr_amp_max", s.scr_amp_max},
                  {"scr_tau_rise", s.scr_tau_rise},
                  {"scr_tau_decay", s.scr_tau_decay},
                  {"artifacts",
                   {{"step", s.artifacts.step},
                    {"spike", s.artifacts.spike},
                    {"burst", s.artifacts.burst},
                    {"saturation", s.artifacts.saturation},
                    {"detach", s.artifacts.detach}}},
                  {"rate_heterogeneity", s.rate_heterogeneity},
                  {"step_min", s.step_min},
                  {"step_max", s.step_max},
                  {"spike_min", s.spike_min},
                  {"spike_max", s.spike_max},
                  {"burst_min", s.burst_min},
                  {"burst_max", s.burst_max},
                  {"saturation_level", s.saturation_level},
                  {"jitter_gain", s.jitter_gain},
                  {"jitter_noise", s.jitter_noise},
                  {"jitter_delay", s.jitter_delay}};
  }
  return j;
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw RejectedInput("config: top level must be a JSON object");
  RunConfig c;
  std::uint64_t seed = c.seed;
  read(j, "seed", seed);
  read(j, "threads", c.threads);

  const json& l = section(j, "label");
  read(l, "clean_threshold", c.label.clean_threshold);
  read(l, "override_threshold", c.label.override_threshold);
  read(l, "zero_var_epsilon", c.label.zero_var_epsilon);
  c.label.check();

  const json& f = section(j, "features");
  read(f, "analysis_fs", c.features.analysis_fs);
  read(f, "win_sec", c.features.win_sec);
  read(f, "entropy_bins", c.features.entropy_bins);
  read(f, "n_bands", c.features.n_bands);
  read(f, "cdm_taps", c.features.cdm_taps);

  const json& m = section(j, "ml");
  std::string kind = to_string(c.ml.kind);
  read(m, "classifier", kind);
  c.ml.kind = classifier_from_string(kind);
  read(m, "selection", c.ml.selection);
  read(m, "k_grid", c.ml.k_grid);
  read(m, "C_grid", c.ml.C_grid);
  read(m, "gamma_grid", c.ml.gamma_grid);
  read(m, "knn_grid", c.ml.knn_grid);
  read(m, "rf_max_features_grid", c.ml.rf_max_features_grid);
  read(m, "rf_trees", c.ml.rf_trees);
  read(m, "selection_trees", c.ml.selection_trees);
  read(m, "group_folds", c.ml.group_folds);
  read(m, "svm_tol", c.ml.svm_tol);
  read(m, "selection_C", c.ml.selection_C);

  const json& b = section(j, "baseline");
  read(b, "eda_min", c.baseline.eda_min);
  read(b, "eda_max", c.baseline.eda_max);
  read(b, "max_slope", c.baseline.max_slope);
  read(b, "dilation_radius", c.baseline.dilation_radius);
  c.baseline.check();

  if (j.contains("synth")) {
    c.has_synth = true;
    const json& s = section(j, "synth");
    SynthConfig& y = c.synth;
    read(s, "n_subjects", y.n_subjects);
    read(s, "duration_s", y.duration_s);
    read(s, "fs", y.fs);
    read(s, "tonic_min", y.tonic_min);
    read(s, "tonic_max", y.tonic_max);
    read(s, "drift_scale", y.drift_scale);
    read(s, "drift_corr_s", y.drift_corr_s);
    read(s, "scr_rate", y.scr_rate);
    read(s, "scr_amp_min", y.scr_amp_min);
    read(s, "scr_amp_max", y.scr_amp_max);
    read(s, "scr_tau_rise", y.scr_tau_rise);
    read(s, "scr_tau_decay", y.scr_tau_decay);
    const json& a = section(s, "artifacts");
    read(a, "step", y.artifacts.step);
    read(a, "spike", y.artifacts.spike);
    read(a, "burst", y.artifacts.burst);
    read(a, "saturation", y.artifacts.saturation);
    read(a, "detach", y.artifacts.detach);
    read(s, "rate_heterogeneity", y.rate_heterogeneity);
    read(s, "step_min", y.step_min);
    read(s, "step_max", y.step_max);
    read(s, "spike_min", y.spike_min);
    read(s, "spike_max", y.spike_max);
    read(s, "burst_min", y.burst_min);
    read(s, "burst_max", y.burst_max);
    read(s, "saturation_level", y.saturation_level);
    read(s, "jitter_gain", y.jitter_gain);
    read(s, "jitter_noise", y.jitter_noise);
    read(s, "jitter_delay", y.jitter_delay);
    y.check();
  }
  c.set_seed(seed);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw RejectedInput("cannot open config file " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw RejectedInput("config " + path + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.has_synth = true;
  auto& s = c.synth;
  if (name == "clean") return c;
  if (name == "medium") {
    s.artifacts = {0.6, 0.6, 0.4, 0.05, 0.2};
    s.rate_heterogeneity = 0.6;
    return c;
  }
  if (name == "easy") {
    s.artifacts = {0.4, 0.4, 0.3, 0.0, 0.1};
    s.step_min = 2.0;
    s.spike_min = 4.0;
    s.burst_min = 1.0;
    return c;
  }
  if (name == "spikes") {
    s.artifacts.spike = 3.0;
    return c;
  }
  throw RejectedInput("unknown preset '" + name + "' (expected clean, medium, easy or spikes)");
}

std::string config_hash(const RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("threads");  // outputs do not depend on the worker count
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Provenance Provenance::of(const RunConfig& cfg) {
  return Provenance{EDAQA_VERSION, edaqa::config_hash(cfg), cfg.seed, kFeatureMapVersion};
}

std::string Provenance::csv_comment() const {
  return "# edaqa " + tool_version + " config_hash=" + config_hash + " seed=" + std::to_string(seed) +
         " feature_map=" + std::to_string(feature_map_version);
}

json Provenance::to_json() const {
  return {{"tool", "edaqa"},
          {"tool_version", tool_version},
          {"config_hash", config_hash},
          {"seed", seed},
          {"feature_map_version", feature_map_version}};
}

}  // namespace edaqa
