#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mixgt/errors.hpp"

namespace mixgt {

/// Smallest scale used when rendering a Laplacian. Mode fitting can return
/// b == 0 for single-bin modes; the clamp keeps the rendered mode one-hot-like.
inline constexpr double kMinScale = 0.05;

/// Tolerance on the sum of a distribution after construction.
inline constexpr double kSumTolerance = 1e-6;

/// Serialized pixel slices whose sum is within this distance of one are
/// renormalized on load; anything further off is rejected.
inline constexpr double kLoadSumTolerance = 1e-3;

/// One point of the Laplace parameter space: mass, location and scale.
/// `b` is the mean absolute deviation of the fitted mode, not the continuous
/// Laplace scale.
struct LaplaceMode {
  double w = 1.0;
  double mu = 0.0;
  double b = 0.0;

  friend bool operator==(const LaplaceMode&, const LaplaceMode&) = default;
};

/// Probability vector over the integer disparity candidates 0..D-1.
/// Entries are non-negative and finite and sum to one within kSumTolerance.
class DiscreteDistribution {
 public:
  /// Divides `probs` by its sum. Throws DegenerateDistributionError on
  /// negative, non-finite or all-zero input.
  static DiscreteDistribution normalized(std::vector<double> probs);

  /// Accepts `probs` unchanged after checking the invariants.
  static DiscreteDistribution from_probabilities(std::vector<double> probs);

  /// Load path for serialized single-precision slices: renormalizes when the
  /// sum is within kLoadSumTolerance of one, throws DataError otherwise.
  static DiscreteDistribution from_serialized(std::span<const float> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t d) const { return probs_[d]; }
  std::span<const double> probs() const noexcept { return probs_; }

 private:
  explicit DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

/// The label point added to parameter space: (w_hat, d_hat, b_hat).
struct LabelAnchor {
  double w_hat = 1.0;
  double d_hat = 0.0;
  double b_hat = 0.8;
  bool valid = false;

  LaplaceMode as_mode() const { return {w_hat, d_hat, b_hat}; }
};

/// H x W x D stack of per-pixel distributions, row-major [h][w][d].
class ProbabilityVolume {
 public:
  ProbabilityVolume() = default;
  ProbabilityVolume(std::size_t height, std::size_t width, std::size_t depth);
  ProbabilityVolume(std::size_t height, std::size_t width, std::size_t depth,
                    std::vector<float> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }

  std::span<const float> pixel(std::size_t y, std::size_t x) const {
    return {data_.data() + (y * width_ + x) * depth_, depth_};
  }
  std::span<float> pixel(std::size_t y, std::size_t x) {
    return {data_.data() + (y * width_ + x) * depth_, depth_};
  }

  /// The (y, x) slice as a validated distribution (see from_serialized).
  DiscreteDistribution distribution(std::size_t y, std::size_t x) const;

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  bool same_shape(const ProbabilityVolume& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && depth_ == other.depth_;
  }

  friend bool operator==(const ProbabilityVolume&, const ProbabilityVolume&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t depth_ = 0;
  std::vector<float> data_;
};

/// M volumes of identical shape, one per ensemble member.
struct EnsembleVolumes {
  std::vector<ProbabilityVolume> members;

  /// Throws DataError when empty or when member shapes differ.
  void validate() const;
  std::size_t height() const { return members.at(0).height(); }
  std::size_t width() const { return members.at(0).width(); }
  std::size_t depth() const { return members.at(0).depth(); }
};

/// H x W disparities. Non-finite or negative values mark invalid pixels.
class DisparityMap {
 public:
  DisparityMap() = default;
  DisparityMap(std::size_t height, std::size_t width, float fill = 0.0f);
  DisparityMap(std::size_t height, std::size_t width, std::vector<float> values);

  static constexpr float kInvalid = std::numeric_limits<float>::infinity();

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }

  float at(std::size_t y, std::size_t x) const { return values_[y * width_ + x]; }
  float& at(std::size_t y, std::size_t x) { return values_[y * width_ + x]; }

  bool valid(std::size_t y, std::size_t x) const { return is_valid_value(at(y, x)); }
  static bool is_valid_value(float v) noexcept { return std::isfinite(v) && v >= 0.0f; }

  std::span<const float> values() const noexcept { return values_; }
  std::span<float> values() noexcept { return values_; }

  bool same_shape(const DisparityMap& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> values_;
};

/// Fused modes sorted by location, plus where the label ended up.
struct GroundTruthMixture {
  std::vector<LaplaceMode> modes;
  std::optional<std::size_t> label_cluster_index;
  std::size_t noise_count = 0;
};

/// Discrete Laplacian over d = 0..D-1 scaled to total mass `mode.w`.
/// The scale is clamped below at kMinScale. Throws InvalidParameterError on
/// non-finite parameters or D == 0.
std::vector<double> evaluate_laplacian(std::size_t depth, const LaplaceMode& mode);

/// Adds evaluate_laplacian(depth, mode) into `out` (out.size() == depth).
void accumulate_laplacian(std::span<double> out, const LaplaceMode& mode);

DiscreteDistribution normalize_distribution(std::vector<double> probs);

}  // namespace mixgt
