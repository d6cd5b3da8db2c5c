#include "mixgt/gt_modeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mixgt/parallel.hpp"

namespace mixgt {
namespace {

constexpr int kUnvisited = -2;
constexpr int kNoise = -1;

std::vector<std::size_t> mu_neighbours(std::span<const ParameterPoint> points, std::size_t i,
                                       double eps) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (std::abs(points[i].mode.mu - points[j].mode.mu) <= eps) out.push_back(j);
  }
  return out;
}

}  // namespace

void ClusterConfig::validate() const {
  if (!(std::isfinite(eps) && eps > 0.0)) throw ConfigError("cluster eps must be positive");
  if (min_pts < 1) throw ConfigError("cluster min_pts must be at least 1");
}

void ModelingConfig::validate() const {
  separation.validate();
  clustering.validate();
  if (!(std::isfinite(label_w) && label_w > 0.0)) {
    throw ConfigError("label weight must be positive and finite");
  }
  if (!(std::isfinite(label_b) && label_b >= 0.0)) {
    throw ConfigError("label scale must be non-negative and finite");
  }
}

std::vector<ParameterPoint> collect_parameter_points(std::span<const DiscreteDistribution> dists,
                                                     const LabelAnchor& anchor,
                                                     const SeparationConfig& cfg) {
  std::vector<ParameterPoint> points;
  for (std::size_t m = 0; m < dists.size(); ++m) {
    if (dists[m].size() != dists.front().size()) {
      throw DataError("ensemble distributions differ in disparity range");
    }
    for (const LaplaceMode& mode : separate_modes(dists[m], cfg)) {
      points.push_back({mode, m});
    }
  }
  if (anchor.valid) points.push_back({anchor.as_mode(), std::nullopt});
  return points;
}

ClusterOutcome cluster_mu(std::span<const ParameterPoint> points, const ClusterConfig& cfg) {
  cfg.validate();
  const std::size_t n = points.size();
  std::vector<int> label(n, kUnvisited);
  int cluster_count = 0;

  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    std::vector<std::size_t> seeds = mu_neighbours(points, i, cfg.eps);
    if (seeds.size() < cfg.min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int k = cluster_count++;
    label[i] = k;
    for (std::size_t q = 0; q < seeds.size(); ++q) {
      const std::size_t j = seeds[q];
      if (label[j] == kNoise) label[j] = k;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = k;
      std::vector<std::size_t> more = mu_neighbours(points, j, cfg.eps);
      if (more.size() >= cfg.min_pts) seeds.insert(seeds.end(), more.begin(), more.end());
    }
  }

  ClusterOutcome outcome;
  outcome.clusters.resize(static_cast<std::size_t>(cluster_count));
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] == kNoise) {
      if (points[i].is_anchor()) {
        // The label is never discarded as biased knowledge.
        label[i] = cluster_count++;
        outcome.clusters.push_back({i});
      } else {
        outcome.noise.push_back(i);
      }
    } else {
      outcome.clusters[static_cast<std::size_t>(label[i])].push_back(i);
    }
    if (points[i].is_anchor()) outcome.label_cluster = static_cast<std::size_t>(label[i]);
  }
  return outcome;
}

void admit_noise(ClusterOutcome& outcome) {
  for (std::size_t i : outcome.noise) outcome.clusters.push_back({i});
  outcome.noise.clear();
}

GroundTruthMixture fuse_clusters(std::span<const ParameterPoint> points,
                                 const ClusterOutcome& outcome, const LabelAnchor& anchor) {
  if (outcome.clusters.empty()) {
    throw EmptyMixtureError("no cluster survived and the pixel has no valid label");
  }
  std::vector<LaplaceMode> fused;
  fused.reserve(outcome.clusters.size());
  for (const std::vector<std::size_t>& cluster : outcome.clusters) {
    if (cluster.empty()) throw DataError("cluster outcome contains an empty cluster");
    LaplaceMode sum{0.0, 0.0, 0.0};
    for (std::size_t i : cluster) {
      if (i >= points.size()) throw DataError("cluster outcome refers to a missing point");
      sum.w += points[i].mode.w;
      sum.mu += points[i].mode.mu;
      sum.b += points[i].mode.b;
    }
    const double count = static_cast<double>(cluster.size());
    fused.push_back({sum.w / count, sum.mu / count, sum.b / count});
  }

  std::optional<std::size_t> label_cluster;
  if (anchor.valid && outcome.label_cluster) {
    label_cluster = *outcome.label_cluster;
    fused.at(*label_cluster).mu = anchor.d_hat;
  }

  std::vector<std::size_t> order(fused.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fused[a].mu < fused[b].mu; });

  GroundTruthMixture mix;
  mix.noise_count = outcome.noise.size();
  mix.modes.reserve(fused.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    mix.modes.push_back(fused[order[pos]]);
    if (label_cluster && order[pos] == *label_cluster) mix.label_cluster_index = pos;
  }
  return mix;
}

DiscreteDistribution render_mixture(std::size_t depth, const GroundTruthMixture& mix) {
  if (mix.modes.empty()) throw EmptyMixtureError("cannot render a mixture without modes");
  std::vector<double> out(depth, 0.0);
  for (const LaplaceMode& mode : mix.modes) accumulate_laplacian(out, mode);
  return DiscreteDistribution::normalized(std::move(out));
}

GroundTruthModel model_ground_truth(std::span<const DiscreteDistribution> dists,
                                    std::size_t depth, const LabelAnchor& anchor,
                                    const ModelingConfig& cfg) {
  cfg.validate();
  for (const DiscreteDistribution& p : dists) {
    if (p.size() != depth) throw DataError("distribution size does not match the depth");
  }
  if (anchor.valid && !(anchor.d_hat >= 0.0 && anchor.d_hat <= static_cast<double>(depth) - 1.0)) {
    throw DataError("label " + std::to_string(anchor.d_hat) + " lies outside [0, D-1]");
  }
  const std::vector<ParameterPoint> points = collect_parameter_points(dists, anchor, cfg.separation);
  ClusterOutcome outcome = cluster_mu(points, cfg.clustering);
  if (cfg.keep_noise) admit_noise(outcome);
  GroundTruthMixture mixture = fuse_clusters(points, outcome, anchor);
  DiscreteDistribution rendered = render_mixture(depth, mixture);
  return {std::move(rendered), std::move(mixture)};
}

VolumeGroundTruth model_ground_truth_volume(const EnsembleVolumes& ensemble,
                                            const DisparityMap& labels,
                                            const ModelingConfig& cfg, unsigned workers) {
  cfg.validate();
  ensemble.validate();
  const std::size_t height = ensemble.height();
  const std::size_t width = ensemble.width();
  const std::size_t depth = ensemble.depth();
  if (labels.height() != height || labels.width() != width) {
    throw DataError("label map is " + std::to_string(labels.width()) + "x" +
                    std::to_string(labels.height()) + " but the ensemble is " +
                    std::to_string(width) + "x" + std::to_string(height));
  }

  VolumeGroundTruth result{ProbabilityVolume(height, width, depth),
                           std::vector<std::uint8_t>(height * width, 0),
                           std::vector<GroundTruthMixture>(height * width)};
  const double max_disparity = static_cast<double>(depth) - 1.0;

  parallel_rows(height, workers, [&](std::size_t y) {
    std::vector<DiscreteDistribution> dists;
    for (std::size_t x = 0; x < width; ++x) {
      const float label = labels.at(y, x);
      LabelAnchor anchor{cfg.label_w, static_cast<double>(label), cfg.label_b, false};
      anchor.valid = DisparityMap::is_valid_value(label) && anchor.d_hat <= max_disparity;
      if (!anchor.valid && !cfg.model_unlabeled) continue;

      dists.clear();
      for (const ProbabilityVolume& member : ensemble.members) {
        dists.push_back(member.distribution(y, x));
      }
      std::optional<GroundTruthModel> model;
      try {
        model.emplace(model_ground_truth(dists, depth, anchor, cfg));
      } catch (const EmptyMixtureError&) {
        continue;  // unlabeled and every ensemble mode was noise
      }

      const std::size_t idx = y * width + x;
      std::span<float> out = result.volume.pixel(y, x);
      for (std::size_t d = 0; d < depth; ++d) out[d] = static_cast<float>(model->distribution[d]);
      result.mask[idx] = 1;
      result.mixtures[idx] = std::move(model->mixture);
    }
  });
  return result;
}

DiscreteDistribution superimpose_average(std::span<const DiscreteDistribution> dists) {
  if (dists.empty()) throw InvalidParameterError("superimposition needs at least one member");
  const std::size_t depth = dists.front().size();
  std::vector<double> mean(depth, 0.0);
  for (const DiscreteDistribution& p : dists) {
    if (p.size() != depth) throw DataError("ensemble distributions differ in disparity range");
    for (std::size_t d = 0; d < depth; ++d) mean[d] += p[d];
  }
  for (double& v : mean) v /= static_cast<double>(dists.size());
  return DiscreteDistribution::from_probabilities(std::move(mean));
}

}  // namespace mixgt
