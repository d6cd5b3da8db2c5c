#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mixgt/core_types.hpp"
#include "mixgt/mode_extraction.hpp"

namespace mixgt {

/// A mode projected into parameter space, tagged with where it came from.
struct ParameterPoint {
  LaplaceMode mode;
  /// Ensemble member index; empty for the label anchor.
  std::optional<std::size_t> member;

  bool is_anchor() const noexcept { return !member.has_value(); }
};

/// Density clustering along mu. A point is core when at least `min_pts`
/// points (itself included) lie within `eps` of it.
struct ClusterConfig {
  double eps = 3.0;
  std::size_t min_pts = 2;

  void validate() const;
};

struct ClusterOutcome {
  /// Point indices per cluster, ascending within each cluster. Clusters are
  /// listed in discovery order.
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> noise;
  std::optional<std::size_t> label_cluster;
};

/// Everything that steers ground-truth modeling. Defaults are the reference
/// hyperparameters.
struct ModelingConfig {
  SeparationConfig separation;
  ClusterConfig clustering;
  double label_w = 1.0;
  double label_b = 0.8;
  /// Re-admit noise points as singleton clusters (disables the filter).
  bool keep_noise = false;
  /// Model pixels without a valid label from the ensemble alone instead of
  /// masking them.
  bool model_unlabeled = false;

  void validate() const;
};

/// Modes of every member (member order, then extraction order), followed by
/// the anchor when the label is valid.
std::vector<ParameterPoint> collect_parameter_points(std::span<const DiscreteDistribution> dists,
                                                     const LabelAnchor& anchor,
                                                     const SeparationConfig& cfg);

/// DBSCAN over the mu coordinates. An anchor that ends up as noise is
/// promoted to its own singleton cluster. Border points reachable from
/// several clusters stay with the first one discovered.
ClusterOutcome cluster_mu(std::span<const ParameterPoint> points, const ClusterConfig& cfg);

/// Moves every noise point into its own singleton cluster.
void admit_noise(ClusterOutcome& outcome);

/// Averages (w, mu, b) over each cluster, pins the label cluster's location
/// to d_hat and sorts the modes by location. Noise is dropped.
GroundTruthMixture fuse_clusters(std::span<const ParameterPoint> points,
                                 const ClusterOutcome& outcome, const LabelAnchor& anchor);

/// Sum of the mixture's Laplacians divided by its L1 norm.
DiscreteDistribution render_mixture(std::size_t depth, const GroundTruthMixture& mix);

struct GroundTruthModel {
  DiscreteDistribution distribution;
  GroundTruthMixture mixture;
};

/// collect -> cluster -> fuse -> render for one pixel. The anchor is used as
/// given. Throws EmptyMixtureError when nothing survives and the label is
/// invalid.
GroundTruthModel model_ground_truth(std::span<const DiscreteDistribution> dists,
                                    std::size_t depth, const LabelAnchor& anchor,
                                    const ModelingConfig& cfg);

struct VolumeGroundTruth {
  ProbabilityVolume volume;
  /// 1 where the pixel carries supervision.
  std::vector<std::uint8_t> mask;
  /// Row-major; empty mixtures for masked pixels.
  std::vector<GroundTruthMixture> mixtures;
};

/// Per-pixel model_ground_truth over a whole ensemble. Labels outside
/// [0, D-1] count as invalid. Masked pixels come out as all-zero slices.
/// The result is bit-identical for any worker count (0 = all cores).
VolumeGroundTruth model_ground_truth_volume(const EnsembleVolumes& ensemble,
                                            const DisparityMap& labels,
                                            const ModelingConfig& cfg, unsigned workers = 0);

/// Entrywise mean of the member distributions.
DiscreteDistribution superimpose_average(std::span<const DiscreteDistribution> dists);

}  // namespace mixgt
