#include "mixgt/mode_extraction.hpp"

#include <algorithm>
#include <cmath>

namespace mixgt {

void SeparationConfig::validate() const {
  if (!(std::isfinite(epsilon) && epsilon > 0.0)) {
    throw ConfigError("separation epsilon must be positive and finite");
  }
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    throw ConfigError("separation sigma must be positive and finite");
  }
}

std::vector<ModeSpan> separate_mode_spans(std::span<const double> probs,
                                          const SeparationConfig& cfg) {
  cfg.validate();
  double total = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidParameterError("mode separation needs finite non-negative probabilities");
    }
    total += v;
  }
  if (total > 1.0 + kSumTolerance) {
    throw InvalidParameterError("mode separation input sums to more than one");
  }

  std::vector<double> p(probs.begin(), probs.end());
  std::vector<ModeSpan> spans;
  if (p.empty()) return spans;
  const std::size_t last = p.size() - 1;

  while (true) {
    // max_element returns the first maximum, i.e. the smallest index on ties.
    const auto peak = std::max_element(p.begin(), p.end());
    if (!(*peak > cfg.epsilon)) break;

    std::size_t l = static_cast<std::size_t>(peak - p.begin());
    std::size_t r = l;
    while (l >= 1 && p[l] - p[l - 1] > cfg.sigma) --l;
    while (r + 1 <= last && p[r] - p[r + 1] > cfg.sigma) ++r;

    double w = 0.0;
    for (std::size_t d = l; d <= r; ++d) w += p[d];
    double mu = 0.0;
    for (std::size_t d = l; d <= r; ++d) mu += (p[d] / w) * static_cast<double>(d);
    double b = 0.0;
    for (std::size_t d = l; d <= r; ++d) b += (p[d] / w) * std::abs(static_cast<double>(d) - mu);

    // mu is a convex combination of bin indices; the clamp only absorbs rounding.
    mu = std::clamp(mu, static_cast<double>(l), static_cast<double>(r));
    spans.push_back({{w, mu, b}, l, r});
    std::fill(p.begin() + static_cast<std::ptrdiff_t>(l),
              p.begin() + static_cast<std::ptrdiff_t>(r) + 1, 0.0);
  }
  return spans;
}

std::vector<LaplaceMode> separate_modes(const DiscreteDistribution& p,
                                        const SeparationConfig& cfg) {
  const std::vector<ModeSpan> spans = separate_mode_spans(p.probs(), cfg);
  std::vector<LaplaceMode> modes;
  modes.reserve(spans.size());
  for (const ModeSpan& s : spans) modes.push_back(s.mode);
  return modes;
}

std::vector<double> reconstruct_from_modes(std::size_t depth,
                                           std::span<const LaplaceMode> modes) {
  std::vector<double> out(depth, 0.0);
  for (const LaplaceMode& m : modes) accumulate_laplacian(out, m);
  return out;
}

}  // namespace mixgt
