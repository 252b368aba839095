#include "kljn/eve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kljn/parallel.hpp"
#include "kljn/rng.hpp"
#include "kljn/stats.hpp"

namespace kljn {

namespace {

void check_significance(double significance) {
  if (!(significance > 0.0 && significance < 1.0)) {
    throw std::domain_error("significance must lie in (0, 1)");
  }
}

void check_test_size(const Trace &samples) {
  if (samples.size() < kMinTestSamples) {
    throw std::domain_error("statistical tests need at least 100 samples");
  }
}

}  // namespace

std::string_view to_string(Hypothesis h) {
  return h == Hypothesis::AliceLow ? "alice_low" : "alice_high";
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::AliceLow:
      return "alice_low";
    case Decision::AliceHigh:
      return "alice_high";
    case Decision::Undecided:
      return "undecided";
  }
  return "undecided";
}

double decision_credit(Decision decision, SwitchState true_alice_state) {
  if (decision == Decision::Undecided) return 0.5;
  const SwitchState claimed =
      decision == Decision::AliceLow ? SwitchState::Low : SwitchState::High;
  return claimed == true_alice_state ? 1.0 : 0.0;
}

Trace reconstruct_alice(const LineTrace &line, double hypothesized_r_alice) {
  if (!(hypothesized_r_alice > 0.0)) throw std::domain_error("resistance must be positive");
  const auto &v = line.voltage();
  const auto &i = line.current();
  std::vector<double> out(line.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = v[k] - i[k] * hypothesized_r_alice;
  }
  return Trace(std::move(out));
}

Trace reconstruct_bob(const LineTrace &line, double hypothesized_r_bob) {
  if (!(hypothesized_r_bob > 0.0)) throw std::domain_error("resistance must be positive");
  const auto &v = line.voltage();
  const auto &i = line.current();
  std::vector<double> out(line.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = v[k] + i[k] * hypothesized_r_bob;
  }
  return Trace(std::move(out));
}

double wrong_hypothesis_variance(const ResistorPair &pair, double sigma_low,
                                 double sigma_high) {
  const HypothesisWeights w = weights(pair, sigma_low, sigma_high);
  return w.alpha * w.alpha + w.beta * w.beta;
}

double security_sigma_ratio(const ResistorPair &pair) {
  return std::sqrt(pair.high() / pair.low());
}

VarianceTestResult variance_test(const Trace &samples, double expected_sigma,
                                 double significance) {
  check_test_size(samples);
  check_significance(significance);
  if (!(expected_sigma > 0.0)) throw std::domain_error("expected sigma must be positive");
  const double n = static_cast<double>(samples.size());
  const double s2 = sample_variance(samples.samples());
  const double sigma2 = expected_sigma * expected_sigma;
  const double z = (s2 - sigma2) / (sigma2 * std::sqrt(2.0 / n));
  const double p = stats::normal_two_sided_p(z);
  return {s2, sigma2, z, p, p < significance};
}

ShapeTestResult shape_test(const Trace &samples, const PdfGrid &reference,
                           double significance) {
  check_test_size(samples);
  check_significance(significance);
  if (std::abs(reference.integral() - 1.0) > kNormalizationTolerance) {
    throw std::domain_error("reference density is not normalized");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = reference.cdf(sorted[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n;
    d = std::max({d, f - below, above - f});
  }
  const double p = stats::ks_p_value(d, n);
  return {d, p, p < significance};
}

PdfGrid reference_pdf(const NoiseSpec &spec) {
  const double s = spec.scale();
  if (spec.kind() == DistributionKind::Cauchy) {
    return centered_pdf(spec.kind(), s, cauchy_grid_policy().support_scales * s, s / 20.0);
  }
  return centered_pdf(spec.kind(), s, 8.0 * s, s / 200.0);
}

Eavesdropper::Eavesdropper(ResistorPair pair, NoiseSpec low, NoiseSpec high,
                           double significance)
    : pair_(pair),
      low_(low),
      high_(high),
      significance_(significance),
      low_reference_(reference_pdf(low)),
      high_reference_(reference_pdf(high)) {
  check_significance(significance);
  if (low.kind() != high.kind()) {
    throw std::domain_error("both resistors must use the same noise family");
  }
}

SourceCheck Eavesdropper::check(const Trace &source, SwitchState assumed,
                                double per_test_significance) const {
  const NoiseSpec &spec = assumed == SwitchState::Low ? low_ : high_;
  const PdfGrid &reference =
      assumed == SwitchState::Low ? low_reference_ : high_reference_;
  SourceCheck result{assumed, std::nullopt,
                     shape_test(source, reference, per_test_significance)};
  if (has_finite_variance(spec.kind())) {
    result.variance = variance_test(source, spec.scale(), per_test_significance);
  }
  return result;
}

HypothesisReport Eavesdropper::evaluate(const LineTrace &line, Hypothesis h) const {
  const SwitchState alice = alice_state(h);
  const SwitchState bob = opposite(alice);
  const int tests = has_finite_variance(low_.kind()) ? 4 : 2;
  const double per_test = significance_ / tests;
  HypothesisReport report{
      h,
      check(reconstruct_alice(line, resistance_for(pair_, alice)), alice, per_test),
      check(reconstruct_bob(line, resistance_for(pair_, bob)), bob, per_test),
      false};
  auto failed = [](const SourceCheck &c) {
    return c.shape.reject || (c.variance && c.variance->reject);
  };
  report.rejected = failed(report.alice) || failed(report.bob);
  return report;
}

EveVerdict Eavesdropper::attack(const LineTrace &line) const {
  EveVerdict verdict{Decision::Undecided,
                     {evaluate(line, Hypothesis::AliceLow),
                      evaluate(line, Hypothesis::AliceHigh)}};
  const bool low_rejected = verdict.hypotheses[0].rejected;
  const bool high_rejected = verdict.hypotheses[1].rejected;
  if (low_rejected != high_rejected) {
    verdict.decision = low_rejected ? Decision::AliceHigh : Decision::AliceLow;
  }
  return verdict;
}

EveVerdict attack(const LineTrace &line, const ResistorPair &pair,
                  const NoiseSpec &spec_low, const NoiseSpec &spec_high,
                  double significance) {
  return Eavesdropper(pair, spec_low, spec_high, significance).attack(line);
}

AttackSummary run_attack_trials(const AttackTrialConfig &config) {
  if (config.trials == 0) throw std::domain_error("at least one trial is required");
  if (config.samples < kMinTestSamples) {
    throw std::domain_error("attack trials need at least 100 samples");
  }
  const NoiseSpec low(config.kind, config.sigma_low);
  const NoiseSpec high(config.kind, config.sigma_high);
  const Eavesdropper eve(config.pair, low, high, config.significance);

  std::vector<Decision> decisions(config.trials);
  std::vector<SwitchState> truth(config.trials);
  parallel_for(config.trials, [&](std::size_t t) {
    const std::uint64_t base = 4 * static_cast<std::uint64_t>(t);
    CounterRng switches(config.seed, base);
    const SwitchState alice = switches.next_bool() ? SwitchState::High : SwitchState::Low;
    const SwitchState bob = opposite(alice);
    const Trace v_alice =
        sample(alice == SwitchState::Low ? low : high, config.samples, config.seed, base + 1);
    const Trace v_bob =
        sample(bob == SwitchState::Low ? low : high, config.samples, config.seed, base + 2);
    const LineTrace line = line_signals(v_alice, v_bob, resistance_for(config.pair, alice),
                                        resistance_for(config.pair, bob));
    truth[t] = alice;
    decisions[t] = eve.attack(line).decision;
  });

  AttackSummary summary;
  summary.trials = config.trials;
  double credit = 0.0;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const double c = decision_credit(decisions[t], truth[t]);
    credit += c;
    if (decisions[t] == Decision::Undecided) {
      ++summary.undecided;
    } else if (c == 1.0) {
      ++summary.correct;
    } else {
      ++summary.wrong;
    }
  }
  summary.accuracy = credit / static_cast<double>(config.trials);
  return summary;
}

}  // namespace kljn
