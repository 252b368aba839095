#ifndef KLJN_DENSITY_HPP_
#define KLJN_DENSITY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "kljn/noise.hpp"

namespace kljn {

/// Raised when a grid misses too much probability mass.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing mass (pre-normalization) above which a grid is rejected.
inline constexpr double kMaxTruncatedMass = 1e-3;
/// Allowed deviation of the trapezoidal integral from 1.
inline constexpr double kNormalizationTolerance = 1e-6;

/*
 * Probability density tabulated on the uniform grid x_i = x0 + i * dx,
 * i = 0..m-1. Values are non-negative and integrate to 1 under the
 * trapezoidal rule. Between nodes the density is taken as the linear
 * interpolant, which is also what cdf() integrates.
 */
class PdfGrid {
 public:
  /// Validates the grid; throws std::domain_error if not normalized.
  PdfGrid(double x0, double dx, std::vector<double> values);

  /// Rescales `values` to unit trapezoidal integral and records the
  /// pre-normalization deficit (1 - raw integral).
  static PdfGrid normalized(double x0, double dx, std::vector<double> values);

  double x0() const { return x0_; }
  double dx() const { return dx_; }
  std::size_t size() const { return values_.size(); }
  double x(std::size_t i) const { return x0_ + static_cast<double>(i) * dx_; }
  double x_last() const { return x(size() - 1); }
  double value(std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  double deficit() const { return deficit_; }

  double integral() const;
  double mean() const;
  double second_moment() const;

  /// Linear interpolation, zero outside the grid.
  double at(double x) const;
  /// Exact integral of the interpolant from x0 to x, clamped to [0, 1].
  double cdf(double x) const;

 private:
  double x0_;
  double dx_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
  double deficit_ = 0.0;
};

double trapezoid(std::span<const double> values, double dx);

/// Mixture weights of the wrong-hypothesis reconstruction,
/// alpha * (unit source) and beta * (unit source).
struct HypothesisWeights {
  double alpha;
  double beta;
};

HypothesisWeights weights(const ResistorPair &pair, double sigma_low,
                          double sigma_high);

/// Closed-form density and CDF of the zero-location family member with the
/// given scale. Uniform has support [-sqrt(3) s, sqrt(3) s].
double density_value(DistributionKind kind, double scale, double x);
double cdf_value(DistributionKind kind, double scale, double x);

/*
 * Tabulates the closed-form density on the grid and renormalizes. Uniform
 * nodes carry the cell average over [x - dx/2, x + dx/2] so the jump at
 * the support edge does not bias the integral; smooth families are
 * sampled pointwise. Throws TruncationError when the grid misses at least
 * kMaxTruncatedMass of the exact probability.
 */
PdfGrid analytic_pdf(DistributionKind kind, double scale, double x0, double dx,
                     std::size_t m);

/// analytic_pdf on the grid {-K dx, ..., K dx}, K = ceil(half_width / dx).
PdfGrid centered_pdf(DistributionKind kind, double scale, double half_width,
                     double dx);

/// Grid for density work. Support is measured in multiples of each
/// density's own scale; dx defaults to the smaller component scale / 200.
struct GridPolicy {
  double support_scales = 8.0;
  std::optional<double> dx;
};

/// Default policy for Cauchy work: heavy tails need a much wider window.
GridPolicy cauchy_grid_policy();

/// Discrete convolution with trapezoidal end weights. Grids must share dx;
/// the result spans the Minkowski sum of the supports.
PdfGrid convolve(const PdfGrid &a, const PdfGrid &b);

/// Density of alpha * X + beta * Y for X, Y i.i.d. from the unit-scale
/// family. With beta == 0 the alpha-scaled density is returned directly.
PdfGrid convolve_scaled(DistributionKind kind, const HypothesisWeights &w,
                        const GridPolicy &policy = {});

/*
 * L1 distance between the sqrt(alpha^2 + beta^2)-scaled family density and
 * convolve_scaled, over the window +-support * sqrt(alpha^2 + beta^2).
 * Finite-variance kinds only; Cauchy goes through cauchy_closure().
 */
double closure_residual(DistributionKind kind, const HypothesisWeights &w,
                        const GridPolicy &policy = {});

/// Cauchy composes scales additively: alpha X + beta Y ~ Cauchy((alpha +
/// beta) gamma). Reports L1 distance of the numerical convolution to that
/// law and to the variance-style sqrt(alpha^2 + beta^2) scaling.
struct CauchyClosure {
  double additive_residual;
  double quadrature_residual;
};

CauchyClosure cauchy_closure(const HypothesisWeights &w, double gamma = 1.0,
                             const GridPolicy &policy = cauchy_grid_policy());

/// L1 distance between two grids sharing dx, over the union of supports.
double l1_distance(const PdfGrid &a, const PdfGrid &b);

}  // namespace kljn

#endif  // KLJN_DENSITY_HPP_
