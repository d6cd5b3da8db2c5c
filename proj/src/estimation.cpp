#include "mixgt/estimation.hpp"

#include <algorithm>
#include <string>

#include "mixgt/parallel.hpp"

namespace mixgt {
namespace {

double clamp_to_range(double d, std::size_t depth) {
  return std::clamp(d, 0.0, static_cast<double>(depth) - 1.0);
}

}  // namespace

Estimator parse_estimator(std::string_view name) {
  if (name == "softargmin") return Estimator::kSoftArgmin;
  if (name == "dme") return Estimator::kDominantMode;
  throw ConfigError("unknown estimator '" + std::string(name) + "' (expected dme or softargmin)");
}

double soft_argmin(const DiscreteDistribution& p) {
  double acc = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) acc += static_cast<double>(d) * p[d];
  return clamp_to_range(acc, p.size());
}

double dme_estimate(const DiscreteDistribution& p, const SeparationConfig& cfg) {
  const std::vector<LaplaceMode> modes = separate_modes(p, cfg);
  if (modes.empty()) return soft_argmin(p);
  const LaplaceMode* best = &modes.front();
  for (const LaplaceMode& m : modes) {
    if (m.w > best->w || (m.w == best->w && m.mu < best->mu)) best = &m;
  }
  return clamp_to_range(best->mu, p.size());
}

double estimate(const DiscreteDistribution& p, Estimator estimator, const SeparationConfig& cfg) {
  return estimator == Estimator::kSoftArgmin ? soft_argmin(p) : dme_estimate(p, cfg);
}

DisparityMap infer_volume(const ProbabilityVolume& volume, Estimator estimator,
                          const SeparationConfig& cfg, unsigned workers) {
  cfg.validate();
  if (volume.depth() == 0) throw DataError("volume has an empty disparity range");
  DisparityMap out(volume.height(), volume.width());
  parallel_rows(volume.height(), workers, [&](std::size_t y) {
    for (std::size_t x = 0; x < volume.width(); ++x) {
      out.at(y, x) = static_cast<float>(estimate(volume.distribution(y, x), estimator, cfg));
    }
  });
  return out;
}

}  // namespace mixgt
