#ifndef KLJN_EVE_HPP_
#define KLJN_EVE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "kljn/density.hpp"
#include "kljn/line.hpp"
#include "kljn/noise.hpp"

namespace kljn {

inline constexpr double kDefaultSignificance = 0.01;
/// Smallest trace a statistical test accepts.
inline constexpr std::size_t kMinTestSamples = 100;

/// Eve's two readings of a mixed-level bit.
enum class Hypothesis { AliceLow, AliceHigh };
enum class Decision { AliceLow, AliceHigh, Undecided };

std::string_view to_string(Hypothesis h);
std::string_view to_string(Decision d);

/// Alice's switch state under the hypothesis.
constexpr SwitchState alice_state(Hypothesis h) {
  return h == Hypothesis::AliceLow ? SwitchState::Low : SwitchState::High;
}

/// 1 for a correct decision, 0 for a wrong one, 0.5 for Undecided.
double decision_credit(Decision decision, SwitchState true_alice_state);

/// V_E - I_E * r: Alice's source if r is her resistor.
Trace reconstruct_alice(const LineTrace &line, double hypothesized_r_alice);
/// V_E + I_E * r: Bob's source if r is his resistor.
Trace reconstruct_bob(const LineTrace &line, double hypothesized_r_bob);

/// Variance of Alice's source as reconstructed under the wrong hypothesis
/// when the truth is LH: sigma_L^2 (2 R_H / S)^2 + sigma_H^2 ((R_H - R_L) / S)^2.
double wrong_hypothesis_variance(const ResistorPair &pair, double sigma_low,
                                 double sigma_high);

/// sqrt(r_high / r_low), the only sigma_H / sigma_L ratio for which the
/// wrong-hypothesis variance equals sigma_H^2.
double security_sigma_ratio(const ResistorPair &pair);

struct VarianceTestResult {
  double empirical_variance;
  double expected_variance;
  double z;
  double p_value;
  bool reject;
};

/*
 * Two-sided test of the sample variance against expected_sigma^2 using the
 * normal approximation z = (s^2 - sigma^2) / (sigma^2 sqrt(2 / n)).
 * Meaningless for Cauchy data; use shape_test there.
 */
VarianceTestResult variance_test(const Trace &samples, double expected_sigma,
                                 double significance);

struct ShapeTestResult {
  double statistic;  // KS distance D
  double p_value;
  bool reject;
};

/// One-sample Kolmogorov-Smirnov test against the CDF of `reference`.
ShapeTestResult shape_test(const Trace &samples, const PdfGrid &reference,
                           double significance);

struct SourceCheck {
  SwitchState assumed_state;
  std::optional<VarianceTestResult> variance;  // absent for Cauchy
  ShapeTestResult shape;
};

struct HypothesisReport {
  Hypothesis hypothesis;
  SourceCheck alice;
  SourceCheck bob;
  bool rejected;
};

struct EveVerdict {
  Decision decision;
  std::array<HypothesisReport, 2> hypotheses;
};

/*
 * Passive eavesdropper that knows the resistor values and the public source
 * statistics. For each hypothesis it reconstructs both sources and tests
 * each against the statistics the hypothesis predicts. Per hypothesis the
 * individual tests run at significance / (number of tests), so a true
 * hypothesis is rejected with probability at most `significance`.
 *
 * A hypothesis is rejected if any of its tests rejects. The decision is the
 * surviving hypothesis when exactly one survives, otherwise Undecided.
 */
class Eavesdropper {
 public:
  Eavesdropper(ResistorPair pair, NoiseSpec low, NoiseSpec high,
               double significance = kDefaultSignificance);

  EveVerdict attack(const LineTrace &line) const;

  const ResistorPair &pair() const { return pair_; }
  double significance() const { return significance_; }

 private:
  SourceCheck check(const Trace &source, SwitchState assumed,
                    double per_test_significance) const;
  HypothesisReport evaluate(const LineTrace &line, Hypothesis h) const;

  ResistorPair pair_;
  NoiseSpec low_;
  NoiseSpec high_;
  double significance_;
  PdfGrid low_reference_;
  PdfGrid high_reference_;
};

EveVerdict attack(const LineTrace &line, const ResistorPair &pair,
                  const NoiseSpec &spec_low, const NoiseSpec &spec_high,
                  double significance = kDefaultSignificance);

/// Reference density Eve compares a reconstructed source against.
PdfGrid reference_pdf(const NoiseSpec &spec);

struct AttackTrialConfig {
  ResistorPair pair;
  DistributionKind kind;
  double sigma_low;
  double sigma_high;
  std::size_t samples;
  std::size_t trials;
  double significance = kDefaultSignificance;
  std::uint64_t seed = 1;
};

struct AttackSummary {
  std::size_t trials = 0;
  std::size_t correct = 0;
  std::size_t wrong = 0;
  std::size_t undecided = 0;
  double accuracy = 0.0;
};

/*
 * Repeated attacks on independent mixed-state bits. Trial t reads streams
 * 4t (Alice's switch), 4t + 1 (Alice's source) and 4t + 2 (Bob's source)
 * of `seed`; Bob always holds the opposite resistor.
 */
AttackSummary run_attack_trials(const AttackTrialConfig &config);

}  // namespace kljn

#endif  // KLJN_EVE_HPP_
