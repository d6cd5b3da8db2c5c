#include "mixgt/core_types.hpp"

#include <algorithm>
#include <string>

namespace mixgt {
namespace {

double checked_sum(std::span<const double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw DegenerateDistributionError("distribution entries must be finite and non-negative");
    }
    sum += p;
  }
  return sum;
}

}  // namespace

DiscreteDistribution DiscreteDistribution::normalized(std::vector<double> probs) {
  const double sum = checked_sum(probs);
  if (!(sum > 0.0)) {
    throw DegenerateDistributionError("distribution has zero total mass");
  }
  for (double& p : probs) p /= sum;
  return DiscreteDistribution(std::move(probs));
}

DiscreteDistribution DiscreteDistribution::from_probabilities(std::vector<double> probs) {
  if (probs.empty()) throw DegenerateDistributionError("distribution is empty");
  const double sum = checked_sum(probs);
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw DegenerateDistributionError("distribution sums to " + std::to_string(sum) +
                                      ", expected 1");
  }
  return DiscreteDistribution(std::move(probs));
}

DiscreteDistribution DiscreteDistribution::from_serialized(std::span<const float> probs) {
  if (probs.empty()) throw DataError("pixel distribution is empty");
  std::vector<double> values(probs.begin(), probs.end());
  double sum = 0.0;
  for (double p : values) {
    if (!std::isfinite(p) || p < 0.0) {
      throw DataError("pixel distribution has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kLoadSumTolerance) {
    throw DataError("pixel distribution sums to " + std::to_string(sum) +
                    ", outside the renormalization tolerance");
  }
  for (double& p : values) p /= sum;
  return DiscreteDistribution(std::move(values));
}

ProbabilityVolume::ProbabilityVolume(std::size_t height, std::size_t width, std::size_t depth)
    : height_(height), width_(width), depth_(depth), data_(height * width * depth, 0.0f) {}

ProbabilityVolume::ProbabilityVolume(std::size_t height, std::size_t width, std::size_t depth,
                                     std::vector<float> data)
    : height_(height), width_(width), depth_(depth), data_(std::move(data)) {
  if (data_.size() != height * width * depth) {
    throw DataError("volume payload has " + std::to_string(data_.size()) +
                    " values, expected " + std::to_string(height * width * depth));
  }
}

DiscreteDistribution ProbabilityVolume::distribution(std::size_t y, std::size_t x) const {
  return DiscreteDistribution::from_serialized(pixel(y, x));
}

void EnsembleVolumes::validate() const {
  if (members.empty()) throw DataError("ensemble has no members");
  const ProbabilityVolume& first = members.front();
  if (first.height() == 0 || first.width() == 0 || first.depth() == 0) {
    throw DataError("ensemble volumes must have positive dimensions");
  }
  for (const ProbabilityVolume& member : members) {
    if (!member.same_shape(first)) throw DataError("ensemble members differ in shape");
  }
}

DisparityMap::DisparityMap(std::size_t height, std::size_t width, float fill)
    : height_(height), width_(width), values_(height * width, fill) {}

DisparityMap::DisparityMap(std::size_t height, std::size_t width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (values_.size() != height * width) throw DataError("disparity map size mismatch");
}

void accumulate_laplacian(std::span<double> out, const LaplaceMode& mode) {
  if (out.empty()) throw InvalidParameterError("disparity range must be positive");
  if (!std::isfinite(mode.w) || !std::isfinite(mode.mu) || !std::isfinite(mode.b)) {
    throw InvalidParameterError("Laplacian parameters must be finite");
  }
  const double scale = std::max(mode.b, kMinScale);
  std::vector<double> kernel(out.size());
  double norm = 0.0;
  for (std::size_t d = 0; d < out.size(); ++d) {
    kernel[d] = std::exp(-std::abs(static_cast<double>(d) - mode.mu) / scale);
    norm += kernel[d];
  }
  if (!(norm > 0.0)) throw InvalidParameterError("Laplacian location lies outside the range");
  for (std::size_t d = 0; d < out.size(); ++d) out[d] += mode.w * kernel[d] / norm;
}

std::vector<double> evaluate_laplacian(std::size_t depth, const LaplaceMode& mode) {
  std::vector<double> out(depth, 0.0);
  accumulate_laplacian(out, mode);
  return out;
}

DiscreteDistribution normalize_distribution(std::vector<double> probs) {
  return DiscreteDistribution::normalized(std::move(probs));
}

}  // namespace mixgt
