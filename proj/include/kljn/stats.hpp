#ifndef KLJN_STATS_HPP_
#define KLJN_STATS_HPP_

namespace kljn::stats {

/// P(|Z| >= |z|) for a standard normal Z.
double normal_two_sided_p(double z);

/*
 * Survival function Q(t) = P(K > t) of the Kolmogorov distribution,
 * K = lim sqrt(n) D_n. Uses the alternating series 2 sum (-1)^(k-1)
 * exp(-2 k^2 t^2) for t >= 1 and the Jacobi theta form for t < 1, where
 * the alternating series converges slowly.
 */
double kolmogorov_survival(double t);

/// Asymptotic p-value of a one-sample KS statistic with the
/// (sqrt(n) + 0.12 + 0.11 / sqrt(n)) effective-size correction.
double ks_p_value(double d, double n);

}  // namespace kljn::stats

#endif  // KLJN_STATS_HPP_
