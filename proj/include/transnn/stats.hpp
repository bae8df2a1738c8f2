#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace transnn {

/// Standard deviation of a frequency estimate when the true success
/// probability p is known.
inline double binomial_sigma(double p, std::int64_t trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

/// Sigma for a frequency whose true probability is unknown, from the
/// observed frequency with an Agresti-Coull style center shift. Stays
/// strictly positive at observed frequencies 0 and 1, where the plug-in
/// estimate collapses and would reject outcomes that are merely one count
/// away from the boundary.
inline double frequency_sigma(double observed, std::int64_t trials) {
  const double nt = static_cast<double>(trials);
  const double shifted = (observed * nt + 2.0) / (nt + 4.0);
  return std::sqrt(shifted * (1.0 - shifted) / (nt + 4.0));
}

}  // namespace transnn
