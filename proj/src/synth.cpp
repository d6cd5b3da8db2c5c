#include "mixgt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mixgt/parallel.hpp"

namespace mixgt::synth {
namespace {

constexpr double kEdgeMargin = 5.0;  // locations stay within [5, D-6]
constexpr int kMaxDraws = 1000;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) {
    rng.discard(1);
    return lo;
  }
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double to_float_precision(double v) { return static_cast<double>(static_cast<float>(v)); }

void render_pixel(std::span<float> out, std::span<const LaplaceMode> modes) {
  std::vector<double> acc(out.size(), 0.0);
  for (const LaplaceMode& m : modes) accumulate_laplacian(acc, m);
  const DiscreteDistribution p = DiscreteDistribution::normalized(std::move(acc));
  for (std::size_t d = 0; d < out.size(); ++d) out[d] = static_cast<float>(p[d]);
}

double min_distance(double mu, std::span<const LaplaceMode> modes) {
  double best = std::numeric_limits<double>::infinity();
  for (const LaplaceMode& m : modes) best = std::min(best, std::abs(mu - m.mu));
  return best;
}

std::vector<LaplaceMode> draw_mixture(Rng& rng, const MixtureRecipe& recipe, std::size_t depth) {
  const double lo = kEdgeMargin;
  const double hi = static_cast<double>(depth) - 1.0 - kEdgeMargin;
  std::vector<LaplaceMode> modes;
  for (int attempt = 0; attempt < kMaxDraws && modes.size() < recipe.modes; ++attempt) {
    if (attempt > 0 && attempt % 50 == 0) modes.clear();  // restart a crowded draw
    const double mu = to_float_precision(uniform(rng, lo, hi));
    if (min_distance(mu, modes) < recipe.min_separation) continue;
    modes.push_back({0.0, mu, 0.0});
  }
  if (modes.size() < recipe.modes) throw ConfigError("could not place the requested modes");

  double total = 0.0;
  for (LaplaceMode& m : modes) {
    m.w = uniform(rng, recipe.w_min, recipe.w_max);
    m.b = uniform(rng, recipe.b_min, recipe.b_max);
    total += m.w;
  }
  for (LaplaceMode& m : modes) m.w /= total;
  std::sort(modes.begin(), modes.end(),
            [](const LaplaceMode& a, const LaplaceMode& b) { return a.mu < b.mu; });
  return modes;
}

double place_spurious(Rng& rng, std::span<const LaplaceMode> truth, std::size_t depth,
                      double clearance) {
  const double lo = kEdgeMargin;
  const double hi = static_cast<double>(depth) - 1.0 - kEdgeMargin;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double mu = std::round(uniform(rng, lo, hi));
    if (min_distance(mu, truth) > clearance) return mu;
  }
  // Crowded pixel: take the location farthest from every true mode.
  double best_mu = lo;
  double best_gap = -1.0;
  for (double mu = std::ceil(lo); mu <= hi; mu += 1.0) {
    const double gap = min_distance(mu, truth);
    if (gap > best_gap) {
      best_gap = gap;
      best_mu = mu;
    }
  }
  return best_mu;
}

}  // namespace

void SceneSpec::validate() const {
  if (height == 0 || width == 0) throw ConfigError("scene must have positive size");
  if (depth < 2 * static_cast<std::size_t>(kEdgeMargin) + 2) {
    throw ConfigError("scene depth is too small for the edge margin");
  }
  if (recipes.empty()) throw ConfigError("scene needs at least one recipe");
  const double span = static_cast<double>(depth) - 1.0 - 2.0 * kEdgeMargin;
  for (const MixtureRecipe& r : recipes) {
    if (r.modes < 1 || r.modes > 3) throw ConfigError("recipe mode count must be 1, 2 or 3");
    if (!(r.w_min > 0.0 && r.w_min <= r.w_max && std::isfinite(r.w_max))) {
      throw ConfigError("recipe weight range must satisfy 0 < w_min <= w_max");
    }
    if (!(r.b_min > 0.0 && r.b_min <= r.b_max && std::isfinite(r.b_max))) {
      throw ConfigError("recipe scale range must satisfy 0 < b_min <= b_max");
    }
    if (!(r.min_separation >= 8.0) || !std::isfinite(r.min_separation)) {
      throw ConfigError("recipe mode separation must be at least 8");
    }
    if (static_cast<double>(r.modes - 1) * r.min_separation > span) {
      throw ConfigError("recipe modes do not fit into the disparity range");
    }
  }
}

void PerturbSpec::validate() const {
  if (members == 0) throw ConfigError("ensemble needs at least one member");
  if (!(mu_jitter >= 0.0 && std::isfinite(mu_jitter))) throw ConfigError("mu_jitter must be >= 0");
  if (!(w_jitter >= 0.0 && std::isfinite(w_jitter))) throw ConfigError("w_jitter must be >= 0");
  if (!(spurious_rate >= 0.0 && spurious_rate <= 1.0)) {
    throw ConfigError("spurious_rate must lie in [0, 1]");
  }
  if (!(spurious_clearance >= 0.0 && std::isfinite(spurious_clearance))) {
    throw ConfigError("spurious_clearance must be >= 0");
  }
}

Scene gen_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene{ProbabilityVolume(spec.height, spec.width, spec.depth),
              DisparityMap(spec.height, spec.width), {}};
  scene.modes.resize(spec.height * spec.width);
  Rng rng(spec.seed);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      const MixtureRecipe& recipe = spec.recipes[x * spec.recipes.size() / spec.width];
      std::vector<LaplaceMode> modes = draw_mixture(rng, recipe, spec.depth);
      render_pixel(scene.volume.pixel(y, x), modes);
      const auto heaviest = std::max_element(
          modes.begin(), modes.end(),
          [](const LaplaceMode& a, const LaplaceMode& b) { return a.w < b.w; });
      scene.labels.at(y, x) = static_cast<float>(heaviest->mu);
      scene.modes[y * spec.width + x] = std::move(modes);
    }
  }
  return scene;
}

PerturbedEnsemble perturb_ensemble(const Scene& truth, const PerturbSpec& spec) {
  spec.validate();
  const std::size_t height = truth.volume.height();
  const std::size_t width = truth.volume.width();
  const std::size_t depth = truth.volume.depth();
  if (truth.modes.size() != height * width) throw DataError("scene truth is incomplete");

  PerturbedEnsemble out;
  out.ensemble.members.assign(spec.members, ProbabilityVolume(height, width, depth));
  out.spurious.resize(height * width);
  Rng rng(spec.seed);
  const double max_mu = static_cast<double>(depth) - 1.0;
  std::vector<LaplaceMode> jittered;

  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t idx = y * width + x;
      const std::vector<LaplaceMode>& modes = truth.modes[idx];

      std::optional<SpuriousMode> spurious;
      if (uniform(rng, 0.0, 1.0) < spec.spurious_rate) {
        SpuriousMode s;
        s.member = std::uniform_int_distribution<std::size_t>(0, spec.members - 1)(rng);
        s.mode.mu = place_spurious(rng, modes, depth, spec.spurious_clearance + spec.mu_jitter);
        s.mode.b = uniform(rng, 0.5, 1.0);
        s.mode.w = kSpuriousMass;
        spurious = s;
      }

      for (std::size_t m = 0; m < spec.members; ++m) {
        jittered.clear();
        for (const LaplaceMode& t : modes) {
          const double mu = std::clamp(t.mu + uniform(rng, -spec.mu_jitter, spec.mu_jitter), 0.0, max_mu);
          const double w = std::max(t.w + uniform(rng, -spec.w_jitter, spec.w_jitter), 0.01);
          jittered.push_back({w, mu, t.b});
        }
        if (spurious && spurious->member == m) {
          double total = 0.0;
          for (const LaplaceMode& j : jittered) total += j.w;
          for (LaplaceMode& j : jittered) j.w *= (1.0 - kSpuriousMass) / total;
          jittered.push_back(spurious->mode);
        }
        render_pixel(out.ensemble.members[m].pixel(y, x), jittered);
      }
      out.spurious[idx] = spurious;
    }
  }
  return out;
}

ProbabilityVolume block_match(const GrayImage& left, const GrayImage& right, std::size_t depth,
                              std::size_t window, double tau, unsigned workers) {
  if (left.height != right.height || left.width != right.width) {
    throw DataError("stereo images differ in size");
  }
  if (left.pixels.size() != left.width * left.height ||
      right.pixels.size() != right.width * right.height || left.pixels.empty()) {
    throw DataError("stereo image buffers are inconsistent");
  }
  if (depth == 0) throw InvalidParameterError("disparity range must be positive");
  if (window == 0 || window % 2 == 0) throw InvalidParameterError("window must be odd and >= 1");
  if (!(tau > 0.0 && std::isfinite(tau))) throw InvalidParameterError("tau must be positive");

  const auto h = static_cast<std::ptrdiff_t>(left.height);
  const auto w = static_cast<std::ptrdiff_t>(left.width);
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const double area = static_cast<double>(window * window);
  auto clamp_row = [h](std::ptrdiff_t v) { return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(v, 0, h - 1)); };
  auto clamp_col = [w](std::ptrdiff_t v) { return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(v, 0, w - 1)); };

  ProbabilityVolume volume(left.height, left.width, depth);
  parallel_rows(left.height, workers, [&](std::size_t yu) {
    std::vector<double> cost(depth);
    const auto y = static_cast<std::ptrdiff_t>(yu);
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      for (std::size_t d = 0; d < depth; ++d) {
        double sad = 0.0;
        for (std::ptrdiff_t dy = -half; dy <= half; ++dy) {
          const std::size_t row = clamp_row(y + dy);
          for (std::ptrdiff_t dx = -half; dx <= half; ++dx) {
            const std::ptrdiff_t col = x + dx;
            const double l = left.at(row, clamp_col(col));
            const double r = right.at(row, clamp_col(col - static_cast<std::ptrdiff_t>(d)));
            sad += std::abs(l - r);
          }
        }
        cost[d] = sad / area;
      }
      const double best = *std::min_element(cost.begin(), cost.end());
      double norm = 0.0;
      for (double& c : cost) {
        c = std::exp(-(c - best) / tau);
        norm += c;
      }
      std::span<float> out = volume.pixel(yu, static_cast<std::size_t>(x));
      for (std::size_t d = 0; d < depth; ++d) out[d] = static_cast<float>(cost[d] / norm);
    }
  });
  return volume;
}

ClusterOutcome brute_force_dbscan(std::span<const ParameterPoint> points, double eps,
                                  std::size_t min_pts) {
  const std::size_t n = points.size();
  // adjacency[i][j]: |mu_i - mu_j| <= eps (reflexive).
  std::vector<std::vector<bool>> adjacent(n, std::vector<bool>(n, false));
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      adjacent[i][j] = std::abs(points[i].mode.mu - points[j].mode.mu) <= eps;
      count += adjacent[i][j] ? 1 : 0;
    }
    core[i] = count >= min_pts;
  }

  // Transitive closure of core-to-core adjacency.
  std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) linked[i][j] = core[i] && core[j] && adjacent[i][j];
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (linked[i][k] && linked[k][j]) linked[i][j] = true;
      }
    }
  }

  // Clusters are identified by their smallest core index, which is also the
  // order in which a scan over ascending indices discovers them.
  std::vector<std::size_t> root(n, n);
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (std::size_t j = 0; j <= i; ++j) {
      if (linked[i][j]) {
        root[i] = j;
        break;
      }
    }
    if (root[i] == i) roots.push_back(i);
  }

  ClusterOutcome outcome;
  outcome.clusters.resize(roots.size());
  auto cluster_of_root = [&](std::size_t r) {
    return static_cast<std::size_t>(std::find(roots.begin(), roots.end(), r) - roots.begin());
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<std::size_t> cluster;
    if (core[i]) {
      cluster = cluster_of_root(root[i]);
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        if (core[j] && adjacent[i][j]) {
          const std::size_t c = cluster_of_root(root[j]);
          if (!cluster || c < *cluster) cluster = c;
        }
      }
    }
    if (!cluster && points[i].is_anchor()) {
      cluster = outcome.clusters.size();
      outcome.clusters.emplace_back();
    }
    if (cluster) {
      outcome.clusters[*cluster].push_back(i);
      if (points[i].is_anchor()) outcome.label_cluster = *cluster;
    } else {
      outcome.noise.push_back(i);
    }
  }
  return outcome;
}

}  // namespace mixgt::synth
