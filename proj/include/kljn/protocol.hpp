#ifndef KLJN_PROTOCOL_HPP_
#define KLJN_PROTOCOL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kljn/eve.hpp"
#include "kljn/line.hpp"
#include "kljn/noise.hpp"

namespace kljn {

inline constexpr std::size_t kMinSamplesPerBit = 100;
/// |z| of the measured line variance against its classified level beyond
/// which a bit is discarded as an outlier.
inline constexpr double kOutlierZ = 8.0;

struct SessionConfig {
  ResistorPair pair{1000.0, 9000.0};
  DistributionKind kind = DistributionKind::Gaussian;
  double sigma_low = 1.0;
  double sigma_high = 3.0;
  std::size_t samples_per_bit = 10000;
  std::size_t bits = 1000;
  std::uint64_t seed = 1;
  double significance = kDefaultSignificance;

  /// Throws std::domain_error on an unusable configuration.
  void validate() const;
};

/// Wire-noise level: both low, mixed, both high.
enum class Level { Low, Mid, High };

std::string_view to_string(Level level);

/// Level implied by the true switch states.
Level true_level(SwitchState alice, SwitchState bob);

/*
 * Nearest theoretical level in log-variance. Boundaries are the geometric
 * means of adjacent levels; a value exactly on a boundary goes to the lower
 * level. Throws std::domain_error unless the three theoretical levels are
 * strictly increasing.
 */
Level classify_level(double measured_variance, const ResistorPair &pair,
                     double sigma_low, double sigma_high);

/// What a party concludes about its peer from its own switch and the level;
/// nullopt when the level is impossible given its own switch.
std::optional<SwitchState> deduce_peer(SwitchState own, Level level);

struct BitRecord {
  std::size_t index;
  SwitchState alice_state;
  SwitchState bob_state;
  double measured_variance;
  Level level;
  bool secure;     // true mixed state
  bool discarded;  // misclassified, outlier or self-inconsistent
  std::optional<int> alice_bit;
  std::optional<int> bob_bit;
  std::optional<int> key_bit;
  std::optional<Decision> eve_decision;
};

struct SessionOutcome {
  SessionConfig config;
  std::vector<BitRecord> records;
  std::size_t secure_bits = 0;
  std::size_t key_bits = 0;
  std::size_t discarded_bits = 0;
  std::size_t key_disagreements = 0;
  double secure_bit_fraction = 0.0;
  double bit_error_rate = 0.0;
  double key_agreement = 1.0;
  /// Mean decision credit over secure bits; nullopt with no secure bits.
  std::optional<double> eve_accuracy;
};

/*
 * Runs config.bits independent bit exchanges. Bit b reads streams 4b
 * (switch states, Alice then Bob), 4b + 1 (Alice's source) and 4b + 2
 * (Bob's source) of config.seed, so the outcome does not depend on how bits
 * are scheduled across threads.
 *
 * Key convention: the bit is Alice's switch (Low = 0, High = 1). Bob
 * recovers it as the complement of his own switch.
 */
SessionOutcome run_session(const SessionConfig &config);

struct SweepPoint {
  double multiplier;
  double sigma_high;
  std::size_t secure_bits;
  double eve_accuracy;
};

/// Eve's accuracy with sigma_high = m * sigma_low * sqrt(r_high / r_low)
/// for each multiplier m; all other settings come from `base`.
std::vector<SweepPoint> leak_sweep(const SessionConfig &base,
                                   std::span<const double> multipliers);

}  // namespace kljn

#endif  // KLJN_PROTOCOL_HPP_
