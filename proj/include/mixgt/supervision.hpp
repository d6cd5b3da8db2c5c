#pragma once

#include <cstdint>
#include <span>

#include "mixgt/core_types.hpp"

namespace mixgt {

/// Predicted probabilities are clamped below at this value before the log.
inline constexpr double kLogClamp = 1e-12;

/// Error threshold k of the ">k px" outlier metric.
struct MetricThreshold {
  double k = 3.0;
};

/// -sum_d target[d] * log(max(pred[d], kLogClamp)).
double cross_entropy(std::span<const double> pred, const DiscreteDistribution& target);
double cross_entropy(const DiscreteDistribution& pred, const DiscreteDistribution& target);

/// Mean cross-entropy over pixels with mask != 0. Throws UndefinedMetricError
/// when the mask selects nothing.
double mean_cross_entropy(const ProbabilityVolume& pred, const ProbabilityVolume& target,
                          std::span<const std::uint8_t> mask);

/// Single normalized Laplacian centred on the label; the usual uni-modal target.
DiscreteDistribution unimodal_gt(std::size_t depth, double d_hat, double b = 0.8);

/// Percentage of gt-valid pixels whose absolute error exceeds thr.k.
/// Non-finite predictions count as outliers.
double outlier_rate(const DisparityMap& pred, const DisparityMap& gt, MetricThreshold thr);

/// Mean absolute error over gt-valid pixels.
double end_point_error(const DisparityMap& pred, const DisparityMap& gt);

}  // namespace mixgt
