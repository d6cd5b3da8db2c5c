#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixgt/core_types.hpp"

namespace mixgt {

/// Thresholds of the peel-off loop: `epsilon` stops the loop once no bin
/// exceeds it, `sigma` is the minimum drop between neighbouring bins for a
/// mode to keep expanding.
struct SeparationConfig {
  double epsilon = 1e-3;
  double sigma = 1e-3;

  void validate() const;
};

/// A fitted mode together with the inclusive bin range it was fitted on.
struct ModeSpan {
  LaplaceMode mode;
  std::size_t left = 0;
  std::size_t right = 0;
};

/// Repeatedly takes the highest bin (ties go to the smallest index), grows a
/// span outwards while the distribution keeps descending by more than sigma,
/// fits (w, mu, b) on that span as (mass, mean, mean absolute deviation) and
/// zeroes it. Stops when no bin exceeds epsilon. The input is not modified.
///
/// `probs` must be finite, non-negative and sum to at most 1 + 1e-6.
std::vector<ModeSpan> separate_mode_spans(std::span<const double> probs,
                                          const SeparationConfig& cfg);

std::vector<LaplaceMode> separate_modes(const DiscreteDistribution& p,
                                        const SeparationConfig& cfg);

/// Entrywise sum of the rendered modes; zero vector for no modes.
std::vector<double> reconstruct_from_modes(std::size_t depth, std::span<const LaplaceMode> modes);

}  // namespace mixgt
