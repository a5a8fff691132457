#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace clsel {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double normal_pdf(double z) {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Accurate in the lower tail down to ~1e-308 via erfc.
inline double normal_cdf(double z) {
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// z * phi(z) with the limit 0 at +/- infinity.
inline double z_times_pdf(double z) {
  if (std::isinf(z)) return 0.0;
  return z * normal_pdf(z);
}

}  // namespace clsel
