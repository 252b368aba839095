#ifndef KLJN_NOISE_HPP_
#define KLJN_NOISE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace kljn {

/// Boltzmann constant, J/K (exact SI value).
inline constexpr double kBoltzmann = 1.380649e-23;

enum class DistributionKind { Gaussian, Uniform, Cauchy };

std::string_view to_string(DistributionKind kind);
/// Accepts "gaussian", "uniform", "cauchy" (case-insensitive).
DistributionKind parse_kind(std::string_view name);

constexpr bool has_finite_variance(DistributionKind kind) {
  return kind != DistributionKind::Cauchy;
}

/// The two selectable resistances shared by both parties, in ohms.
class ResistorPair {
 public:
  /// Throws std::domain_error unless 0 < r_low < r_high.
  ResistorPair(double r_low, double r_high);

  /// Admits r_low == r_high for limit analysis; never valid for a session.
  static ResistorPair relaxed(double r_low, double r_high);

  double low() const { return r_low_; }
  double high() const { return r_high_; }
  double sum() const { return r_low_ + r_high_; }
  bool degenerate() const { return r_low_ == r_high_; }

 private:
  struct Unchecked {};
  ResistorPair(double r_low, double r_high, Unchecked)
      : r_low_(r_low), r_high_(r_high) {}

  double r_low_;
  double r_high_;
};

/// One party's source statistics. `scale` is the standard deviation for
/// Gaussian and Uniform and the half-width-at-half-maximum for Cauchy.
class NoiseSpec {
 public:
  NoiseSpec(DistributionKind kind, double scale);

  DistributionKind kind() const { return kind_; }
  double scale() const { return scale_; }

 private:
  DistributionKind kind_;
  double scale_;
};

/// Immutable, non-empty sequence of finite samples (volts or amperes).
class Trace {
 public:
  explicit Trace(std::vector<double> samples);

  std::size_t size() const { return samples_.size(); }
  double operator[](std::size_t i) const { return samples_[i]; }
  std::span<const double> samples() const { return samples_; }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  friend bool operator==(const Trace &, const Trace &) = default;

 private:
  std::vector<double> samples_;
};

/// RMS voltage sqrt(4 k T R B) of band-limited Johnson noise.
double johnson_sigma(double resistance, double temperature, double bandwidth);

/// sigma_low * sqrt(r_high / r_low): the amplitude the high resistor's
/// source must have for thermal-like scaling.
double scaled_sigma_high(const ResistorPair &pair, double sigma_low);

/*
 * Draws n i.i.d. zero-location samples.
 *
 * Deterministic in (spec, n, seed, stream). Draws from CounterRng(seed,
 * stream): Gaussian uses Box-Muller on consecutive 64-bit word pairs
 * (cosine branch for even indices, sine branch for odd), Uniform maps one
 * word onto [-sqrt(3) sigma, sqrt(3) sigma), Cauchy applies
 * gamma * tan(pi (u - 1/2)) to an open-interval uniform so the result is
 * always finite.
 */
Trace sample(const NoiseSpec &spec, std::size_t n, std::uint64_t seed,
             std::uint64_t stream = 0);

double sample_mean(std::span<const double> xs);
/// Unbiased (n - 1) sample variance; needs at least two samples.
double sample_variance(std::span<const double> xs);

}  // namespace kljn

#endif  // KLJN_NOISE_HPP_
