#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mixgt/core_types.hpp"
#include "mixgt/gt_modeling.hpp"
#include "mixgt/io_formats.hpp"

namespace mixgt::synth {

/// How the true mixture of one scene region is drawn.
struct MixtureRecipe {
  std::size_t modes = 1;  // K in {1, 2, 3}
  double w_min = 0.2;     // raw weights are drawn from [w_min, w_max], then normalized
  double w_max = 1.0;
  double b_min = 0.5;
  double b_max = 3.0;
  double min_separation = 8.0;
};

/// The image is split into vertical bands of equal width, one per recipe.
struct SceneSpec {
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t depth = 96;
  std::uint64_t seed = 1;
  std::vector<MixtureRecipe> recipes{MixtureRecipe{}};

  /// Throws ConfigError when a recipe cannot be honoured.
  void validate() const;
};

struct Scene {
  ProbabilityVolume volume;
  /// Location of the heaviest true mode per pixel.
  DisparityMap labels;
  /// True modes per pixel, row-major, sorted by location.
  std::vector<std::vector<LaplaceMode>> modes;
};

/// Renders each pixel's true mixture and normalizes it. Locations are kept
/// within [5, D-6] and rounded to float precision so labels match exactly.
Scene gen_scene(const SceneSpec& spec);

struct PerturbSpec {
  std::size_t members = 9;
  double mu_jitter = 1.0;
  double w_jitter = 0.1;
  /// Probability that a pixel gets one far-away mode injected into one member.
  double spurious_rate = 0.0;
  /// Spurious locations keep more than this distance (plus mu_jitter) from every true mode.
  double spurious_clearance = 16.0;
  std::uint64_t seed = 2;

  void validate() const;
};

/// Mass given to an injected spurious mode; taken proportionally from the true modes.
inline constexpr double kSpuriousMass = 0.1;

struct SpuriousMode {
  std::size_t member = 0;
  LaplaceMode mode;
};

struct PerturbedEnsemble {
  EnsembleVolumes ensemble;
  /// Row-major; set where a spurious mode was injected.
  std::vector<std::optional<SpuriousMode>> spurious;
};

/// Re-renders every member from jittered true parameters.
PerturbedEnsemble perturb_ensemble(const Scene& truth, const PerturbSpec& spec);

/// Mean absolute difference over a window between the left pixel and the
/// right pixel d columns to the left (edge-replicated), turned into a
/// distribution with softmax(-cost / tau) over d = 0..D-1.
ProbabilityVolume block_match(const GrayImage& left, const GrayImage& right, std::size_t depth,
                              std::size_t window, double tau, unsigned workers = 0);

/// Exhaustive O(n^2) DBSCAN reference over the mu coordinates, sharing the
/// anchor-rescue and border-assignment conventions of cluster_mu. Test oracle.
ClusterOutcome brute_force_dbscan(std::span<const ParameterPoint> points, double eps,
                                  std::size_t min_pts);

}  // namespace mixgt::synth
