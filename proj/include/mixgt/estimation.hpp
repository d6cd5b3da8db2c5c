#pragma once

#include <string_view>

#include "mixgt/core_types.hpp"
#include "mixgt/mode_extraction.hpp"

namespace mixgt {

enum class Estimator { kSoftArgmin, kDominantMode };

/// Parses "softargmin" or "dme"; throws ConfigError otherwise.
Estimator parse_estimator(std::string_view name);

/// Probability-weighted mean of the candidates.
double soft_argmin(const DiscreteDistribution& p);

/// Location of the heaviest separated mode (ties go to the smaller location),
/// i.e. the soft-argmin restricted to that mode's span. Falls back to the
/// global soft-argmin when no bin exceeds epsilon.
double dme_estimate(const DiscreteDistribution& p, const SeparationConfig& cfg);

double estimate(const DiscreteDistribution& p, Estimator estimator, const SeparationConfig& cfg);

/// Per-pixel estimate over a volume; worker count does not affect the result.
DisparityMap infer_volume(const ProbabilityVolume& volume, Estimator estimator,
                          const SeparationConfig& cfg, unsigned workers = 0);

}  // namespace mixgt
