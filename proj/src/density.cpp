#include "kljn/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace kljn {

namespace {

void check_grid_shape(double dx, std::size_t m) {
  if (!(dx > 0.0) || !std::isfinite(dx)) {
    throw std::domain_error("grid step must be positive and finite");
  }
  if (m < 2) throw std::domain_error("grid needs at least two nodes");
}

std::size_t half_count(double half_width, double dx) {
  if (!(half_width > 0.0)) throw std::domain_error("grid half-width must be positive");
  // Guard against 8.0000000001 steps turning into 9.
  return static_cast<std::size_t>(std::ceil(half_width / dx - 1e-9));
}

double resolve_dx(const GridPolicy &policy, double smallest_scale) {
  const double dx = policy.dx.value_or(smallest_scale / 200.0);
  if (!(dx > 0.0) || !std::isfinite(dx)) {
    throw std::domain_error("grid step must be positive and finite");
  }
  if (!(policy.support_scales > 0.0)) {
    throw std::domain_error("grid support must be positive");
  }
  return dx;
}

/// Restricts `grid` to nodes within [-K dx, K dx] and renormalizes.
PdfGrid window(const PdfGrid &grid, std::size_t k) {
  const double first = -static_cast<double>(k) * grid.dx();
  const auto offset = static_cast<long long>(std::llround((first - grid.x0()) / grid.dx()));
  std::vector<double> values(2 * k + 1, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const long long src = offset + static_cast<long long>(i);
    if (src >= 0 && src < static_cast<long long>(grid.size())) {
      values[i] = grid.value(static_cast<std::size_t>(src));
    }
  }
  return PdfGrid::normalized(first, grid.dx(), std::move(values));
}

}  // namespace

double trapezoid(std::span<const double> values, double dx) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * dx;
}

PdfGrid::PdfGrid(double x0, double dx, std::vector<double> values)
    : x0_(x0), dx_(dx), values_(std::move(values)) {
  check_grid_shape(dx_, values_.size());
  if (!std::isfinite(x0_)) throw std::domain_error("grid origin must be finite");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::domain_error("density values must be finite and non-negative");
    }
  }
  const double total = trapezoid(values_, dx_);
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw std::domain_error(
        fmt::format("density grid is not normalized (integral {:.9g})", total));
  }
  cumulative_.resize(values_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + 0.5 * dx_ * (values_[i - 1] + values_[i]);
  }
}

PdfGrid PdfGrid::normalized(double x0, double dx, std::vector<double> values) {
  check_grid_shape(dx, values.size());
  const double raw = trapezoid(values, dx);
  if (!(raw > 0.0) || !std::isfinite(raw)) {
    throw std::domain_error("density grid carries no mass");
  }
  for (auto &v : values) v /= raw;
  PdfGrid grid(x0, dx, std::move(values));
  grid.deficit_ = 1.0 - raw;
  return grid;
}

double PdfGrid::integral() const { return trapezoid(values_, dx_); }

double PdfGrid::mean() const {
  std::vector<double> moment(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) moment[i] = x(i) * values_[i];
  return trapezoid(moment, dx_);
}

double PdfGrid::second_moment() const {
  std::vector<double> moment(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    moment[i] = x(i) * x(i) * values_[i];
  }
  return trapezoid(moment, dx_);
}

double PdfGrid::at(double xq) const {
  const double pos = (xq - x0_) / dx_;
  if (pos < 0.0 || pos > static_cast<double>(size() - 1)) return 0.0;
  const auto i = std::min(static_cast<std::size_t>(pos), size() - 2);
  const double t = pos - static_cast<double>(i);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

double PdfGrid::cdf(double xq) const {
  const double pos = (xq - x0_) / dx_;
  if (pos <= 0.0) return 0.0;
  if (pos >= static_cast<double>(size() - 1)) return 1.0;
  const auto i = static_cast<std::size_t>(pos);
  const double t = (pos - static_cast<double>(i)) * dx_;
  const double slope = (values_[i + 1] - values_[i]) / dx_;
  const double c = cumulative_[i] + values_[i] * t + 0.5 * slope * t * t;
  return std::clamp(c, 0.0, 1.0);
}

HypothesisWeights weights(const ResistorPair &pair, double sigma_low,
                          double sigma_high) {
  if (!(sigma_low > 0.0) || !(sigma_high > 0.0)) {
    throw std::domain_error("sigmas must be positive");
  }
  return {sigma_low * 2.0 * pair.high() / pair.sum(),
          sigma_high * (pair.high() - pair.low()) / pair.sum()};
}

double density_value(DistributionKind kind, double scale, double x) {
  switch (kind) {
    case DistributionKind::Gaussian: {
      const double z = x / scale;
      return std::exp(-0.5 * z * z) / (scale * std::sqrt(2.0 * std::numbers::pi));
    }
    case DistributionKind::Uniform: {
      const double half_width = std::numbers::sqrt3 * scale;
      return std::abs(x) <= half_width ? 1.0 / (2.0 * half_width) : 0.0;
    }
    case DistributionKind::Cauchy: {
      const double z = x / scale;
      return 1.0 / (std::numbers::pi * scale * (1.0 + z * z));
    }
  }
  return 0.0;
}

double cdf_value(DistributionKind kind, double scale, double x) {
  switch (kind) {
    case DistributionKind::Gaussian:
      return 0.5 * std::erfc(-x / (scale * std::numbers::sqrt2));
    case DistributionKind::Uniform: {
      const double half_width = std::numbers::sqrt3 * scale;
      return std::clamp((x + half_width) / (2.0 * half_width), 0.0, 1.0);
    }
    case DistributionKind::Cauchy:
      return 0.5 + std::atan(x / scale) / std::numbers::pi;
  }
  return 0.0;
}

PdfGrid analytic_pdf(DistributionKind kind, double scale, double x0, double dx,
                     std::size_t m) {
  check_grid_shape(dx, m);
  if (!(scale > 0.0)) throw std::domain_error("scale must be positive");
  const double x_last = x0 + static_cast<double>(m - 1) * dx;
  const double missing = 1.0 - (cdf_value(kind, scale, x_last) - cdf_value(kind, scale, x0));
  if (missing >= kMaxTruncatedMass) {
    throw TruncationError(fmt::format(
        "{} grid [{}, {}] misses {:.3g} of the probability mass", to_string(kind),
        x0, x_last, missing));
  }
  std::vector<double> values(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = x0 + static_cast<double>(i) * dx;
    if (kind == DistributionKind::Uniform) {
      const double lo = cdf_value(kind, scale, x - 0.5 * dx);
      const double hi = cdf_value(kind, scale, x + 0.5 * dx);
      values[i] = (hi - lo) / dx;
    } else {
      values[i] = density_value(kind, scale, x);
    }
  }
  return PdfGrid::normalized(x0, dx, std::move(values));
}

PdfGrid centered_pdf(DistributionKind kind, double scale, double half_width,
                     double dx) {
  const std::size_t k = half_count(half_width, dx);
  return analytic_pdf(kind, scale, -static_cast<double>(k) * dx, dx, 2 * k + 1);
}

GridPolicy cauchy_grid_policy() { return GridPolicy{700.0, std::nullopt}; }

PdfGrid convolve(const PdfGrid &a, const PdfGrid &b) {
  if (std::abs(a.dx() - b.dx()) > 1e-12 * a.dx()) {
    throw std::domain_error("convolved grids must share the same step");
  }
  const double dx = a.dx();
  const std::size_t ma = a.size();
  const std::size_t mb = b.size();
  std::vector<double> weighted(a.values().begin(), a.values().end());
  weighted.front() *= 0.5;
  weighted.back() *= 0.5;
  const auto bv = b.values();
  std::vector<double> out(ma + mb - 1, 0.0);
  for (std::size_t i = 0; i < ma; ++i) {
    const double wa = weighted[i] * dx;
    if (wa == 0.0) continue;
    double *dst = out.data() + i;
    for (std::size_t j = 0; j < mb; ++j) dst[j] += wa * bv[j];
  }
  return PdfGrid::normalized(a.x0() + b.x0(), dx, std::move(out));
}

PdfGrid convolve_scaled(DistributionKind kind, const HypothesisWeights &w,
                        const GridPolicy &policy) {
  if (!(w.alpha > 0.0) || !(w.beta >= 0.0)) {
    throw std::domain_error("weights require alpha > 0 and beta >= 0");
  }
  const double smallest = w.beta > 0.0 ? std::min(w.alpha, w.beta) : w.alpha;
  const double dx = resolve_dx(policy, smallest);
  const PdfGrid first =
      centered_pdf(kind, w.alpha, policy.support_scales * w.alpha, dx);
  if (w.beta == 0.0) return first;
  const PdfGrid second =
      centered_pdf(kind, w.beta, policy.support_scales * w.beta, dx);
  return convolve(first, second);
}

double closure_residual(DistributionKind kind, const HypothesisWeights &w,
                        const GridPolicy &policy) {
  if (!has_finite_variance(kind)) {
    throw std::domain_error(
        "closure_residual needs a finite-variance family; use cauchy_closure");
  }
  const double sigma_a = std::hypot(w.alpha, w.beta);
  const double smallest = w.beta > 0.0 ? std::min(w.alpha, w.beta) : w.alpha;
  const double dx = resolve_dx(policy, smallest);
  GridPolicy resolved = policy;
  resolved.dx = dx;

  const std::size_t k = half_count(policy.support_scales * sigma_a, dx);
  const PdfGrid mixture = window(convolve_scaled(kind, w, resolved), k);
  const PdfGrid family =
      analytic_pdf(kind, sigma_a, -static_cast<double>(k) * dx, dx, 2 * k + 1);
  return l1_distance(family, mixture);
}

CauchyClosure cauchy_closure(const HypothesisWeights &w, double gamma,
                             const GridPolicy &policy) {
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
  const HypothesisWeights scaled{w.alpha * gamma, w.beta * gamma};
  GridPolicy resolved = policy;
  if (!resolved.dx) {
    const double smallest = scaled.beta > 0.0 ? std::min(scaled.alpha, scaled.beta)
                                              : scaled.alpha;
    resolved.dx = smallest / 10.0;
  }
  const PdfGrid mixture = convolve_scaled(DistributionKind::Cauchy, scaled, resolved);

  auto residual_against = [&](double scale) {
    const PdfGrid law = analytic_pdf(DistributionKind::Cauchy, scale, mixture.x0(),
                                     mixture.dx(), mixture.size());
    return l1_distance(law, mixture);
  };
  return {residual_against(scaled.alpha + scaled.beta),
          residual_against(std::hypot(scaled.alpha, scaled.beta))};
}

double l1_distance(const PdfGrid &a, const PdfGrid &b) {
  if (std::abs(a.dx() - b.dx()) > 1e-12 * a.dx()) {
    throw std::domain_error("compared grids must share the same step");
  }
  const double dx = a.dx();
  const double lo = std::min(a.x0(), b.x0());
  const double hi = std::max(a.x_last(), b.x_last());
  const auto m = static_cast<std::size_t>(std::llround((hi - lo) / dx)) + 1;
  std::vector<double> diff(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = lo + static_cast<double>(i) * dx;
    diff[i] = std::abs(a.at(x) - b.at(x));
  }
  return trapezoid(diff, dx);
}

}  // namespace kljn
