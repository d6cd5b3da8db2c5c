#include "mixgt/config.hpp"

#include <charconv>
#include <sstream>

#include "mixgt/io_formats.hpp"

namespace mixgt {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("'" + key + "' expects a real number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + text + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!cfg.values_.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  return parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

ModelingConfig modeling_config_from(const KeyValueConfig& kv) {
  ModelingConfig cfg;
  for (const auto& [key, value] : kv.values()) {
    if (key == "eps") cfg.clustering.eps = to_real(key, value);
    else if (key == "min_pts") cfg.clustering.min_pts = to_unsigned(key, value);
    else if (key == "epsilon") cfg.separation.epsilon = to_real(key, value);
    else if (key == "sigma") cfg.separation.sigma = to_real(key, value);
    else if (key == "label_w") cfg.label_w = to_real(key, value);
    else if (key == "label_b") cfg.label_b = to_real(key, value);
    else if (key == "keep_noise") cfg.keep_noise = to_bool(key, value);
    else if (key == "model_unlabeled") cfg.model_unlabeled = to_bool(key, value);
    else throw ConfigError("unknown configuration key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

SynthConfig synth_config_from(const KeyValueConfig& kv) {
  SynthConfig cfg;
  synth::MixtureRecipe shared;
  std::vector<std::size_t> counts{1};
  for (const auto& [key, value] : kv.values()) {
    if (key == "H") cfg.scene.height = to_unsigned(key, value);
    else if (key == "W") cfg.scene.width = to_unsigned(key, value);
    else if (key == "D") cfg.scene.depth = to_unsigned(key, value);
    else if (key == "seed") cfg.scene.seed = to_unsigned(key, value);
    else if (key == "recipes") {
      counts.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) counts.push_back(to_unsigned(key, std::string(trim(item))));
    }
    else if (key == "w_min") shared.w_min = to_real(key, value);
    else if (key == "w_max") shared.w_max = to_real(key, value);
    else if (key == "b_min") shared.b_min = to_real(key, value);
    else if (key == "b_max") shared.b_max = to_real(key, value);
    else if (key == "min_separation") shared.min_separation = to_real(key, value);
    else if (key == "members") cfg.perturb.members = to_unsigned(key, value);
    else if (key == "mu_jitter") cfg.perturb.mu_jitter = to_real(key, value);
    else if (key == "w_jitter") cfg.perturb.w_jitter = to_real(key, value);
    else if (key == "spurious_rate") cfg.perturb.spurious_rate = to_real(key, value);
    else if (key == "spurious_clearance") cfg.perturb.spurious_clearance = to_real(key, value);
    else if (key == "perturb_seed") cfg.perturb.seed = to_unsigned(key, value);
    else throw ConfigError("unknown configuration key '" + key + "'");
  }
  cfg.scene.recipes.clear();
  for (std::size_t k : counts) {
    synth::MixtureRecipe r = shared;
    r.modes = k;
    cfg.scene.recipes.push_back(r);
  }
  cfg.scene.validate();
  cfg.perturb.validate();
  return cfg;
}

}  // namespace mixgt
