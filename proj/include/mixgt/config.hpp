#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "mixgt/gt_modeling.hpp"
#include "mixgt/synth.hpp"

namespace mixgt {

/// Parsed `key = value` lines. Blank lines and lines starting with '#' are
/// skipped; trailing '#' comments are stripped. Duplicate keys are an error.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

 private:
  std::map<std::string, std::string> values_;
};

/// Keys: eps, min_pts, epsilon, sigma, label_w, label_b, keep_noise, model_unlabeled.
/// Unknown keys throw ConfigError.
ModelingConfig modeling_config_from(const KeyValueConfig& kv);

/// Scene keys: H, W, D, seed, recipes (comma-separated mode counts, one band
/// each), w_min, w_max, b_min, b_max, min_separation. Ensemble keys: members,
/// mu_jitter, w_jitter, spurious_rate, spurious_clearance, perturb_seed.
/// Unknown keys throw ConfigError.
struct SynthConfig {
  synth::SceneSpec scene;
  synth::PerturbSpec perturb;
};
SynthConfig synth_config_from(const KeyValueConfig& kv);

}  // namespace mixgt
