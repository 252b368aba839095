#include "kljn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kljn::stats {

double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

double kolmogorov_survival(double t) {
  if (!(t > 0.0)) return 1.0;
  if (t < 1.0) {
    // P(K <= t) = sqrt(2 pi) / t * sum_{k odd} exp(-k^2 pi^2 / (8 t^2))
    const double a = std::numbers::pi * std::numbers::pi / (8.0 * t * t);
    double sum = 0.0;
    for (int k = 1; k < 200; k += 2) {
      const double term = std::exp(-a * k * k);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / t * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_p_value(double d, double n) {
  const double root = std::sqrt(n);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace kljn::stats
