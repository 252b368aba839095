#include "kljn/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "kljn/parallel.hpp"
#include "kljn/rng.hpp"

namespace kljn {

void SessionConfig::validate() const {
  if (!has_finite_variance(kind)) {
    throw std::domain_error(
        "sessions classify levels by variance; cauchy sources are unsupported");
  }
  if (!(sigma_low > 0.0) || !(sigma_high > 0.0)) {
    throw std::domain_error("sigmas must be positive");
  }
  if (samples_per_bit < kMinSamplesPerBit) {
    throw std::domain_error("samples_per_bit must be at least 100");
  }
  if (bits < 1) throw std::domain_error("bits must be at least 1");
  if (!(significance > 0.0 && significance < 1.0)) {
    throw std::domain_error("significance must lie in (0, 1)");
  }
  // Strictly ordered ladder is required for classification.
  classify_level(1.0, pair, sigma_low, sigma_high);
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Low:
      return "low";
    case Level::Mid:
      return "mid";
    case Level::High:
      return "high";
  }
  return "low";
}

Level true_level(SwitchState alice, SwitchState bob) {
  if (alice != bob) return Level::Mid;
  return alice == SwitchState::Low ? Level::Low : Level::High;
}

Level classify_level(double measured_variance, const ResistorPair &pair,
                     double sigma_low, double sigma_high) {
  const double low = theoretical_line_variance(pair, sigma_low, sigma_high,
                                               SwitchState::Low, SwitchState::Low);
  const double mid = theoretical_line_variance(pair, sigma_low, sigma_high,
                                               SwitchState::Low, SwitchState::High);
  const double high = theoretical_line_variance(pair, sigma_low, sigma_high,
                                                SwitchState::High, SwitchState::High);
  if (!(low < mid && mid < high)) {
    throw std::domain_error("line variance levels are not strictly ordered");
  }
  if (measured_variance <= std::sqrt(low * mid)) return Level::Low;
  if (measured_variance <= std::sqrt(mid * high)) return Level::Mid;
  return Level::High;
}

std::optional<SwitchState> deduce_peer(SwitchState own, Level level) {
  switch (level) {
    case Level::Mid:
      return opposite(own);
    case Level::Low:
      if (own == SwitchState::Low) return SwitchState::Low;
      return std::nullopt;
    case Level::High:
      if (own == SwitchState::High) return SwitchState::High;
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

double level_variance(const SessionConfig &c, Level level) {
  switch (level) {
    case Level::Low:
      return theoretical_line_variance(c.pair, c.sigma_low, c.sigma_high,
                                       SwitchState::Low, SwitchState::Low);
    case Level::Mid:
      return theoretical_line_variance(c.pair, c.sigma_low, c.sigma_high,
                                       SwitchState::Low, SwitchState::High);
    case Level::High:
      return theoretical_line_variance(c.pair, c.sigma_low, c.sigma_high,
                                       SwitchState::High, SwitchState::High);
  }
  return 0.0;
}

int bit_of(SwitchState s) { return s == SwitchState::High ? 1 : 0; }

BitRecord exchange_bit(const SessionConfig &c, const NoiseSpec &low,
                       const NoiseSpec &high, const Eavesdropper &eve,
                       std::size_t index) {
  const std::uint64_t base = 4 * static_cast<std::uint64_t>(index);
  CounterRng switches(c.seed, base);
  const SwitchState alice = switches.next_bool() ? SwitchState::High : SwitchState::Low;
  const SwitchState bob = switches.next_bool() ? SwitchState::High : SwitchState::Low;

  auto spec_for = [&](SwitchState s) -> const NoiseSpec & {
    return s == SwitchState::Low ? low : high;
  };
  const Trace v_alice = sample(spec_for(alice), c.samples_per_bit, c.seed, base + 1);
  const Trace v_bob = sample(spec_for(bob), c.samples_per_bit, c.seed, base + 2);
  const LineTrace line = line_signals(v_alice, v_bob, resistance_for(c.pair, alice),
                                      resistance_for(c.pair, bob));

  BitRecord record{};
  record.index = index;
  record.alice_state = alice;
  record.bob_state = bob;
  record.secure = alice != bob;
  record.measured_variance = sample_variance(line.voltage().samples());
  record.level = classify_level(record.measured_variance, c.pair, c.sigma_low, c.sigma_high);

  const double expected = level_variance(c, record.level);
  const double n = static_cast<double>(c.samples_per_bit);
  const double z = (record.measured_variance - expected) / (expected * std::sqrt(2.0 / n));
  const bool outlier = std::abs(z) > kOutlierZ;

  const auto alice_view = deduce_peer(alice, record.level);
  const auto bob_view = deduce_peer(bob, record.level);
  if (!outlier && record.level == Level::Mid) {
    if (alice_view) record.alice_bit = bit_of(alice);
    if (bob_view) record.bob_bit = bit_of(opposite(bob));
  }
  record.discarded = outlier || !alice_view || !bob_view ||
                     record.level != true_level(alice, bob);
  if (record.secure && !record.discarded) record.key_bit = record.alice_bit;
  if (record.secure) record.eve_decision = eve.attack(line).decision;
  return record;
}

}  // namespace

SessionOutcome run_session(const SessionConfig &config) {
  config.validate();
  const NoiseSpec low(config.kind, config.sigma_low);
  const NoiseSpec high(config.kind, config.sigma_high);
  const Eavesdropper eve(config.pair, low, high, config.significance);

  SessionOutcome outcome;
  outcome.config = config;
  outcome.records.resize(config.bits);
  parallel_for(config.bits, [&](std::size_t b) {
    outcome.records[b] = exchange_bit(config, low, high, eve, b);
  });

  double credit = 0.0;
  std::size_t agreed = 0;
  for (const BitRecord &r : outcome.records) {
    if (r.discarded) ++outcome.discarded_bits;
    if (r.secure) {
      ++outcome.secure_bits;
      credit += decision_credit(*r.eve_decision, r.alice_state);
    }
    if (r.key_bit) {
      ++outcome.key_bits;
      if (r.alice_bit == r.bob_bit) {
        ++agreed;
      } else {
        ++outcome.key_disagreements;
      }
    }
  }
  const auto bits = static_cast<double>(config.bits);
  outcome.secure_bit_fraction = static_cast<double>(outcome.secure_bits) / bits;
  outcome.bit_error_rate = static_cast<double>(outcome.discarded_bits) / bits;
  outcome.key_agreement =
      outcome.key_bits ? static_cast<double>(agreed) / static_cast<double>(outcome.key_bits)
                       : 1.0;
  if (outcome.secure_bits) {
    outcome.eve_accuracy = credit / static_cast<double>(outcome.secure_bits);
  }
  return outcome;
}

std::vector<SweepPoint> leak_sweep(const SessionConfig &base,
                                   std::span<const double> multipliers) {
  if (multipliers.empty()) throw std::domain_error("leak sweep needs at least one multiplier");
  for (double m : multipliers) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::domain_error("sweep multipliers must be positive");
    }
  }
  const double secure_high = base.sigma_low * security_sigma_ratio(base.pair);
  std::vector<SweepPoint> points;
  points.reserve(multipliers.size());
  for (double m : multipliers) {
    SessionConfig config = base;
    config.sigma_high = m * secure_high;
    const SessionOutcome outcome = run_session(config);
    points.push_back({m, config.sigma_high, outcome.secure_bits,
                      outcome.eve_accuracy.value_or(0.5)});
  }
  return points;
}

}  // namespace kljn
