#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kljn/eve.hpp"
#include "kljn/rng.hpp"
#include "oracles.hpp"

using namespace kljn;

namespace {

struct Bit {
  Trace alice;
  Trace bob;
  LineTrace line;
};

Bit make_bit(const ResistorPair &pair, const NoiseSpec &low, const NoiseSpec &high,
             SwitchState alice, SwitchState bob, std::size_t n, std::uint64_t seed) {
  Trace va = sample(alice == SwitchState::Low ? low : high, n, seed, 1);
  Trace vb = sample(bob == SwitchState::Low ? low : high, n, seed, 2);
  LineTrace line = line_signals(va, vb, resistance_for(pair, alice), resistance_for(pair, bob));
  return {std::move(va), std::move(vb), std::move(line)};
}

LineTrace single_sample_line(double v, double i) {
  return LineTrace(Trace({v}), Trace({i}));
}

}  // namespace

TEST(Reconstruct, HandChecks) {
  const LineTrace line = single_sample_line(3.0, -1.0);
  // Wrong hypothesis with V_LA = 4, V_HB = 0, R_L = 1, R_H = 3: 4 * 6/4 = 6.
  EXPECT_DOUBLE_EQ(reconstruct_alice(line, 3.0)[0], 6.0);
  EXPECT_DOUBLE_EQ(reconstruct_alice(line, 1.0)[0], 4.0);
  EXPECT_DOUBLE_EQ(reconstruct_bob(line, 1.0)[0], 2.0);
  EXPECT_DOUBLE_EQ(reconstruct_bob(line, 3.0)[0], 0.0);
  const LineTrace zero = single_sample_line(0.0, 0.0);
  EXPECT_EQ(reconstruct_alice(zero, 2.0)[0], 0.0);
  EXPECT_EQ(reconstruct_bob(zero, 2.0)[0], 0.0);
  EXPECT_THROW(reconstruct_alice(line, 0.0), std::domain_error);
}

TEST(Reconstruct, TrueHypothesisInvertsTheLoop) {
  CounterRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const double r_low = 1.0 + 1e4 * rng.next_unit();
    const ResistorPair pair(r_low, r_low * (1.5 + 20.0 * rng.next_unit()));
    const NoiseSpec low(DistributionKind::Gaussian, 0.1 + rng.next_unit());
    const NoiseSpec high(DistributionKind::Gaussian, 0.1 + 3.0 * rng.next_unit());
    const auto alice = rng.next_bool() ? SwitchState::High : SwitchState::Low;
    const auto bob = rng.next_bool() ? SwitchState::High : SwitchState::Low;
    const Bit bit = make_bit(pair, low, high, alice, bob, 1000, 100 + trial);
    const Trace ra = reconstruct_alice(bit.line, resistance_for(pair, alice));
    const Trace rb = reconstruct_bob(bit.line, resistance_for(pair, bob));
    const double scale = std::max(*std::max_element(bit.alice.begin(), bit.alice.end(),
                                                    [](double a, double b) { return std::abs(a) < std::abs(b); }),
                                  1.0);
    for (std::size_t i = 0; i < ra.size(); ++i) {
      ASSERT_NEAR(ra[i], bit.alice[i], 1e-12 * std::abs(scale) * 10);
      ASSERT_NEAR(rb[i], bit.bob[i], 1e-12 * std::abs(scale) * 10);
    }
    // Re-running the divider on the reconstructions reproduces V_E.
    const LineTrace again = line_signals(ra, rb, resistance_for(pair, alice), resistance_for(pair, bob));
    for (std::size_t i = 0; i < ra.size(); ++i) {
      ASSERT_NEAR(again.voltage()[i], bit.line.voltage()[i], 1e-11 * std::abs(scale));
    }
  }
}

TEST(WrongHypothesisVariance, HandEvaluated) {
  const ResistorPair pair(1.0, 4.0);
  EXPECT_NEAR(wrong_hypothesis_variance(pair, 1.0, 2.0), 4.0, 1e-14);
  EXPECT_NEAR(wrong_hypothesis_variance(pair, 1.0, 1.0), 2.92, 1e-14);
}

TEST(WrongHypothesisVariance, SecurityFixedPoint) {
  CounterRng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const double r_low = std::exp(10.0 * rng.next_unit() - 2.0);
    const ResistorPair pair(r_low, r_low * (1.0 + 1e-3 + 50.0 * rng.next_unit()));
    const double sigma_low = std::exp(4.0 * rng.next_unit() - 2.0);
    const double sigma_high = sigma_low * security_sigma_ratio(pair);
    EXPECT_NEAR(wrong_hypothesis_variance(pair, sigma_low, sigma_high) / (sigma_high * sigma_high),
                1.0, 1e-12);
  }
}

TEST(SecuritySigmaRatio, Examples) {
  EXPECT_DOUBLE_EQ(security_sigma_ratio(ResistorPair(1e3, 9e3)), 3.0);
  EXPECT_DOUBLE_EQ(security_sigma_ratio(ResistorPair::relaxed(1e3, 1e3)), 1.0);
  const ResistorPair pair(1e3, 9e3);
  EXPECT_NEAR(wrong_hypothesis_variance(pair, 1.0, security_sigma_ratio(pair)), 9.0, 9e-12);
}

TEST(WrongHypothesis, MonteCarloMatchesVarianceFormula) {
  CounterRng rng(99);
  const std::size_t n = 100000;
  for (auto kind : {DistributionKind::Gaussian, DistributionKind::Uniform}) {
    for (int trial = 0; trial < 10; ++trial) {
      const ResistorPair pair(1.0 + rng.next_unit(), 3.0 + 10.0 * rng.next_unit());
      const double sl = 0.5 + rng.next_unit();
      const double sh = 0.5 + 3.0 * rng.next_unit();
      const NoiseSpec low(kind, sl), high(kind, sh);
      const Bit bit = make_bit(pair, low, high, SwitchState::Low, SwitchState::High, n, 500 + trial);
      const Trace wrong = reconstruct_alice(bit.line, pair.high());
      const double expected = wrong_hypothesis_variance(pair, sl, sh);
      EXPECT_LE(std::abs(sample_variance(wrong.samples()) / expected - 1.0),
                5.0 * std::sqrt(2.0 / static_cast<double>(n)))
          << to_string(kind) << " trial " << trial;
    }
  }
}

TEST(WrongHypothesis, IsTheWeightedMixtureOfUnitSources) {
  // The second source enters with a negative sign; both families are even,
  // so densities and variances are unaffected.
  const ResistorPair pair(2.0, 7.0);
  const double sl = 0.8, sh = 0.8 * security_sigma_ratio(pair);
  const NoiseSpec low(DistributionKind::Uniform, sl), high(DistributionKind::Uniform, sh);
  const Bit bit = make_bit(pair, low, high, SwitchState::Low, SwitchState::High, 5000, 4);
  const HypothesisWeights w = weights(pair, sl, sh);
  const Trace wrong = reconstruct_alice(bit.line, pair.high());
  for (std::size_t i = 0; i < wrong.size(); ++i) {
    const double mixture = w.alpha * (bit.alice[i] / sl) - w.beta * (bit.bob[i] / sh);
    ASSERT_NEAR(wrong[i], mixture, 1e-12 * std::max(1.0, std::abs(mixture)));
  }
}

TEST(VarianceTest, DetectsLeakingVariance) {
  const Trace t = sample(NoiseSpec(DistributionKind::Gaussian, std::sqrt(2.92)), 100000, 17);
  const VarianceTestResult r = variance_test(t, 1.0, 0.01);
  // (2.92 - 1) / sqrt(2 / 1e5) = 429.3, up to sampling error in s^2.
  EXPECT_NEAR(r.z, 429.3, 429.3 * 0.03);
  EXPECT_TRUE(r.reject);
  EXPECT_EQ(r.expected_variance, 1.0);
}

TEST(VarianceTest, RejectsBadInputs) {
  const Trace tiny = sample(NoiseSpec(DistributionKind::Gaussian, 1.0), 99, 1);
  EXPECT_THROW(variance_test(tiny, 1.0, 0.01), std::domain_error);
  const Trace ok = sample(NoiseSpec(DistributionKind::Gaussian, 1.0), 100, 1);
  EXPECT_THROW(variance_test(ok, 0.0, 0.01), std::domain_error);
  EXPECT_THROW(variance_test(ok, 1.0, 0.0), std::domain_error);
  EXPECT_THROW(variance_test(ok, 1.0, 1.0), std::domain_error);
}

TEST(VarianceTest, NullRejectionRateMatchesSignificance) {
  const double significance = 0.05;
  const int trials = 1000;
  int rejected = 0;
  for (int t = 0; t < trials; ++t) {
    const Trace s = sample(NoiseSpec(DistributionKind::Gaussian, 1.7), 100000, 2024, t);
    rejected += variance_test(s, 1.7, significance).reject;
  }
  const double rate = static_cast<double>(rejected) / trials;
  EXPECT_NEAR(rate, significance, 3.0 * std::sqrt(significance * (1 - significance) / trials));
}

TEST(ShapeTest, NullRejectionRateMatchesSignificance) {
  const double significance = 0.05;
  const int trials = 400;
  const NoiseSpec spec(DistributionKind::Gaussian, 1.3);
  const PdfGrid reference = reference_pdf(spec);
  int rejected = 0;
  for (int t = 0; t < trials; ++t) {
    rejected += shape_test(sample(spec, 100000, 77, t), reference, significance).reject;
  }
  const double rate = static_cast<double>(rejected) / trials;
  EXPECT_NEAR(rate, significance, 3.0 * std::sqrt(significance * (1 - significance) / trials));
}

TEST(ShapeTest, UniformNullIsCalibrated) {
  const double significance = 0.05;
  const int trials = 400;
  const NoiseSpec spec(DistributionKind::Uniform, 2.0);
  const PdfGrid reference = reference_pdf(spec);
  int rejected = 0;
  for (int t = 0; t < trials; ++t) {
    rejected += shape_test(sample(spec, 100000, 78, t), reference, significance).reject;
  }
  const double rate = static_cast<double>(rejected) / trials;
  EXPECT_NEAR(rate, significance, 3.0 * std::sqrt(significance * (1 - significance) / trials));
}

TEST(ShapeTest, TrapezoidIsAlwaysDetected) {
  const ResistorPair pair(1.0, 4.0);
  const NoiseSpec low(DistributionKind::Uniform, 1.0), high(DistributionKind::Uniform, 2.0);
  const PdfGrid reference = reference_pdf(high);

  // Largest CDF gap between the trapezoid and the uniform law, from the
  // closed-form densities on a fine midpoint rule.
  const double edge = std::numbers::sqrt3 * 2.8;
  const int steps = 400000;
  const double h = 2.0 * edge / steps;
  double f_mix = 0.0, f_uni = 0.0, gap = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double x = -edge + (i + 0.5) * h;
    f_mix += oracle::uniform_mixture_density(1.6, 1.2, x) * h;
    f_uni += oracle::uniform_density(2.0, x) * h;
    gap = std::max(gap, std::abs(f_mix - f_uni));
  }
  ASSERT_GT(gap, 0.03);

  int rejected = 0;
  for (int t = 0; t < 100; ++t) {
    const Bit bit = make_bit(pair, low, high, SwitchState::Low, SwitchState::High, 100000, 900 + t);
    const ShapeTestResult r = shape_test(reconstruct_alice(bit.line, pair.high()), reference, 0.01);
    EXPECT_NEAR(r.statistic, gap, 0.01);
    rejected += r.reject;
  }
  EXPECT_GE(rejected, 99);
}

TEST(ShapeTest, EmpiricalReferenceConvergesToZeroDistance) {
  // Histogram density of a large independent draw as the reference.
  const NoiseSpec spec(DistributionKind::Gaussian, 1.0);
  const Trace pool = sample(spec, 2'000'000, 5);
  const double dx = 0.01;
  const std::size_t k = 800;
  std::vector<double> counts(2 * k + 1, 0.0);
  for (double v : pool) {
    const auto idx = static_cast<long long>(std::llround(v / dx)) + static_cast<long long>(k);
    if (idx >= 0 && idx < static_cast<long long>(counts.size())) counts[static_cast<std::size_t>(idx)] += 1.0;
  }
  const PdfGrid reference = PdfGrid::normalized(-static_cast<double>(k) * dx, dx, counts);

  auto mean_d = [&](std::size_t n) {
    double total = 0.0;
    for (int t = 0; t < 20; ++t) total += shape_test(sample(spec, n, 6, t), reference, 0.01).statistic;
    return total / 20.0;
  };
  const double d_small = mean_d(100), d_mid = mean_d(10000), d_large = mean_d(200000);
  EXPECT_LT(d_mid, d_small / 5.0);
  EXPECT_LT(d_large, d_mid / 2.0);
  EXPECT_LT(d_large, 5e-3);
}

TEST(ShapeTest, RejectsShortTraces) {
  const NoiseSpec spec(DistributionKind::Gaussian, 1.0);
  EXPECT_THROW(shape_test(sample(spec, 50, 1), reference_pdf(spec), 0.01), std::domain_error);
}

TEST(Attack, VerdictDecisionFollowsRejections) {
  const ResistorPair pair(1.0, 4.0);
  const NoiseSpec low(DistributionKind::Gaussian, 1.0), high(DistributionKind::Gaussian, 3.0);
  const Eavesdropper eve(pair, low, high);
  int decided = 0;
  for (int t = 0; t < 20; ++t) {
    const auto alice = t % 2 ? SwitchState::High : SwitchState::Low;
    const Bit bit = make_bit(pair, low, high, alice, opposite(alice), 20000, 40 + t);
    const EveVerdict v = eve.attack(bit.line);
    const bool a = v.hypotheses[0].rejected, b = v.hypotheses[1].rejected;
    EXPECT_EQ(v.decision == Decision::Undecided, a == b);
    // The variance gap makes the wrong hypothesis fail every time here; the
    // true one only fails at the significance level, which yields a tie.
    EXPECT_NE(v.decision, alice == SwitchState::Low ? Decision::AliceHigh : Decision::AliceLow);
    decided += v.decision != Decision::Undecided;
    ASSERT_TRUE(v.hypotheses[0].alice.variance.has_value());
  }
  EXPECT_GE(decided, 18);
}

TEST(Attack, NonMixedStateRejectsBothHypotheses) {
  const ResistorPair pair(1.0, 4.0);
  const NoiseSpec low(DistributionKind::Gaussian, 1.0), high(DistributionKind::Gaussian, 2.0);
  const Bit bit = make_bit(pair, low, high, SwitchState::Low, SwitchState::Low, 20000, 8);
  const EveVerdict v = attack(bit.line, pair, low, high);
  EXPECT_EQ(v.decision, Decision::Undecided);
  EXPECT_TRUE(v.hypotheses[0].rejected);
  EXPECT_TRUE(v.hypotheses[1].rejected);
}

TEST(Attack, CauchyUsesShapeOnly) {
  const ResistorPair pair(1.0, 4.0);
  const NoiseSpec low(DistributionKind::Cauchy, 1.0), high(DistributionKind::Cauchy, 2.0);
  const Bit bit = make_bit(pair, low, high, SwitchState::High, SwitchState::Low, 20000, 12);
  const EveVerdict v = attack(bit.line, pair, low, high);
  EXPECT_FALSE(v.hypotheses[0].alice.variance.has_value());
  EXPECT_EQ(v.decision, Decision::AliceHigh);
}

TEST(Attack, RejectsMixedFamilies) {
  EXPECT_THROW(Eavesdropper(ResistorPair(1.0, 4.0), NoiseSpec(DistributionKind::Gaussian, 1.0),
                            NoiseSpec(DistributionKind::Uniform, 2.0)),
               std::domain_error);
}

TEST(AttackTrials, SecureGaussianIsACoinFlip) {
  const AttackSummary s = run_attack_trials(
      {ResistorPair(1.0, 4.0), DistributionKind::Gaussian, 1.0, 2.0, 10000, 300, 0.01, 5});
  EXPECT_EQ(s.trials, 300u);
  EXPECT_EQ(s.correct + s.wrong + s.undecided, 300u);
  EXPECT_NEAR(s.accuracy, 0.5, 3.0 * std::sqrt(0.25 / 300));
}

TEST(AttackTrials, AmplitudeMismatchLeaks) {
  const AttackSummary s = run_attack_trials(
      {ResistorPair(1.0, 4.0), DistributionKind::Gaussian, 1.0, 3.0, 100000, 40, 0.01, 6});
  EXPECT_GT(s.accuracy, 0.97);
}

TEST(AttackTrials, ReplaysAndValidates) {
  const AttackTrialConfig config{ResistorPair(1.0, 4.0), DistributionKind::Uniform, 1.0, 2.0, 2000, 30, 0.01, 9};
  const AttackSummary a = run_attack_trials(config);
  const AttackSummary b = run_attack_trials(config);
  EXPECT_EQ(a.correct, b.correct);
  EXPECT_EQ(a.undecided, b.undecided);
  AttackTrialConfig none = config;
  none.trials = 0;
  EXPECT_THROW(run_attack_trials(none), std::domain_error);
}

TEST(DecisionCredit, CountsTiesAsHalf) {
  EXPECT_EQ(decision_credit(Decision::AliceLow, SwitchState::Low), 1.0);
  EXPECT_EQ(decision_credit(Decision::AliceLow, SwitchState::High), 0.0);
  EXPECT_EQ(decision_credit(Decision::Undecided, SwitchState::High), 0.5);
}
