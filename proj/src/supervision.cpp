#include "mixgt/supervision.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mixgt {
namespace {

void require_same_shape(const DisparityMap& pred, const DisparityMap& gt) {
  if (!pred.same_shape(gt)) throw DataError("prediction and ground truth differ in size");
}

}  // namespace

double cross_entropy(std::span<const double> pred, const DiscreteDistribution& target) {
  if (pred.size() != target.size()) {
    throw DataError("cross-entropy inputs have " + std::to_string(pred.size()) + " and " +
                    std::to_string(target.size()) + " bins");
  }
  double loss = 0.0;
  for (std::size_t d = 0; d < pred.size(); ++d) {
    if (target[d] == 0.0) continue;
    loss -= target[d] * std::log(std::max(pred[d], kLogClamp));
  }
  return std::max(loss, 0.0);
}

double cross_entropy(const DiscreteDistribution& pred, const DiscreteDistribution& target) {
  return cross_entropy(pred.probs(), target);
}

double mean_cross_entropy(const ProbabilityVolume& pred, const ProbabilityVolume& target,
                          std::span<const std::uint8_t> mask) {
  if (!pred.same_shape(target)) throw DataError("prediction and target volumes differ in shape");
  if (mask.size() != pred.pixel_count()) throw DataError("mask size does not match the volume");
  double total = 0.0;
  std::size_t count = 0;
  std::vector<double> p(pred.depth());
  for (std::size_t y = 0; y < pred.height(); ++y) {
    for (std::size_t x = 0; x < pred.width(); ++x) {
      if (mask[y * pred.width() + x] == 0) continue;
      const std::span<const float> slice = pred.pixel(y, x);
      std::copy(slice.begin(), slice.end(), p.begin());
      total += cross_entropy(p, target.distribution(y, x));
      ++count;
    }
  }
  if (count == 0) throw UndefinedMetricError("no valid pixels for the loss");
  return total / static_cast<double>(count);
}

DiscreteDistribution unimodal_gt(std::size_t depth, double d_hat, double b) {
  if (depth == 0) throw InvalidParameterError("disparity range must be positive");
  if (!(std::isfinite(d_hat) && d_hat >= 0.0 && d_hat <= static_cast<double>(depth) - 1.0)) {
    throw DataError("label " + std::to_string(d_hat) + " lies outside [0, D-1]");
  }
  return DiscreteDistribution::normalized(evaluate_laplacian(depth, {1.0, d_hat, b}));
}

double outlier_rate(const DisparityMap& pred, const DisparityMap& gt, MetricThreshold thr) {
  require_same_shape(pred, gt);
  if (!(std::isfinite(thr.k) && thr.k > 0.0)) {
    throw InvalidParameterError("outlier threshold must be positive");
  }
  std::size_t valid = 0;
  std::size_t outliers = 0;
  const std::span<const float> p = pred.values();
  const std::span<const float> g = gt.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!DisparityMap::is_valid_value(g[i])) continue;
    ++valid;
    const double err = std::abs(static_cast<double>(p[i]) - static_cast<double>(g[i]));
    if (!std::isfinite(err) || err > thr.k) ++outliers;
  }
  if (valid == 0) throw UndefinedMetricError("ground truth has no valid pixels");
  return 100.0 * static_cast<double>(outliers) / static_cast<double>(valid);
}

double end_point_error(const DisparityMap& pred, const DisparityMap& gt) {
  require_same_shape(pred, gt);
  std::size_t valid = 0;
  double total = 0.0;
  const std::span<const float> p = pred.values();
  const std::span<const float> g = gt.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!DisparityMap::is_valid_value(g[i])) continue;
    ++valid;
    total += std::abs(static_cast<double>(p[i]) - static_cast<double>(g[i]));
  }
  if (valid == 0) throw UndefinedMetricError("ground truth has no valid pixels");
  return total / static_cast<double>(valid);
}

}  // namespace mixgt
