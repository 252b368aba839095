#include "kljn/noise.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "kljn/rng.hpp"

namespace kljn {

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Gaussian:
      return "gaussian";
    case DistributionKind::Uniform:
      return "uniform";
    case DistributionKind::Cauchy:
      return "cauchy";
  }
  return "unknown";
}

DistributionKind parse_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "gaussian" || lower == "normal") return DistributionKind::Gaussian;
  if (lower == "uniform") return DistributionKind::Uniform;
  if (lower == "cauchy") return DistributionKind::Cauchy;
  throw std::invalid_argument(fmt::format("unknown distribution kind '{}'", name));
}

ResistorPair::ResistorPair(double r_low, double r_high)
    : ResistorPair(relaxed(r_low, r_high)) {
  if (!(r_low < r_high)) {
    throw std::domain_error(fmt::format(
        "resistor pair requires r_low < r_high (got {} and {})", r_low, r_high));
  }
}

ResistorPair ResistorPair::relaxed(double r_low, double r_high) {
  if (!(r_low > 0.0) || !(r_high > 0.0) || !std::isfinite(r_low) ||
      !std::isfinite(r_high)) {
    throw std::domain_error("resistances must be positive and finite");
  }
  if (r_low > r_high) {
    throw std::domain_error("resistor pair requires r_low <= r_high");
  }
  return ResistorPair(r_low, r_high, Unchecked{});
}

NoiseSpec::NoiseSpec(DistributionKind kind, double scale)
    : kind_(kind), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::domain_error("noise scale must be positive and finite");
  }
}

Trace::Trace(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::domain_error("trace must not be empty");
  if (!std::all_of(samples_.begin(), samples_.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw std::domain_error("trace contains non-finite samples");
  }
}

double johnson_sigma(double resistance, double temperature, double bandwidth) {
  if (!(resistance > 0.0) || !(temperature > 0.0) || !(bandwidth > 0.0)) {
    throw std::domain_error("johnson_sigma arguments must be positive");
  }
  return std::sqrt(4.0 * kBoltzmann * temperature * resistance * bandwidth);
}

double scaled_sigma_high(const ResistorPair &pair, double sigma_low) {
  if (!(sigma_low > 0.0)) throw std::domain_error("sigma_low must be positive");
  return sigma_low * std::sqrt(pair.high() / pair.low());
}

Trace sample(const NoiseSpec &spec, std::size_t n, std::uint64_t seed,
             std::uint64_t stream) {
  if (n == 0) throw std::domain_error("sample count must be at least 1");
  CounterRng rng(seed, stream);
  std::vector<double> out(n);
  const double scale = spec.scale();
  switch (spec.kind()) {
    case DistributionKind::Gaussian:
      for (std::size_t i = 0; i < n; i += 2) {
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        const double u1 = 1.0 - rng.next_unit();
        const double u2 = rng.next_unit();
        const double radius = scale * std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        out[i] = radius * std::cos(angle);
        if (i + 1 < n) out[i + 1] = radius * std::sin(angle);
      }
      break;
    case DistributionKind::Uniform: {
      const double half_width = std::numbers::sqrt3 * scale;
      for (auto &v : out) v = half_width * (2.0 * rng.next_unit() - 1.0);
      break;
    }
    case DistributionKind::Cauchy:
      for (auto &v : out) {
        v = scale * std::tan(std::numbers::pi * (rng.next_open_unit() - 0.5));
      }
      break;
  }
  return Trace(std::move(out));
}

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw std::domain_error("mean of empty sequence");
  double sum = 0.0;
  for (double v : xs) sum += v;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::domain_error("variance needs two samples");
  const double mean = sample_mean(xs);
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace kljn
