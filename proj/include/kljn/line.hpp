#ifndef KLJN_LINE_HPP_
#define KLJN_LINE_HPP_

#include <string_view>

#include "kljn/noise.hpp"

namespace kljn {

enum class SwitchState { Low, High };

std::string_view to_string(SwitchState state);

inline constexpr SwitchState opposite(SwitchState s) {
  return s == SwitchState::Low ? SwitchState::High : SwitchState::Low;
}

inline double resistance_for(const ResistorPair &pair, SwitchState s) {
  return s == SwitchState::Low ? pair.low() : pair.high();
}

/*
 * Wire voltage V_E and wire current I_E seen by a passive observer.
 * Positive current flows from Bob's side toward Alice's side.
 */
class LineTrace {
 public:
  LineTrace(Trace voltage, Trace current);

  const Trace &voltage() const { return voltage_; }
  const Trace &current() const { return current_; }
  std::size_t size() const { return voltage_.size(); }

 private:
  Trace voltage_;
  Trace current_;
};

/// Ideal loop: per sample V_E = (v_a r_b + v_b r_a) / (r_a + r_b) and
/// I_E = (v_b - v_a) / (r_a + r_b).
LineTrace line_signals(const Trace &v_alice, const Trace &v_bob,
                       double r_alice, double r_bob);

/// Variance of V_E for independent finite-variance sources selected by
/// each party's switch state.
double theoretical_line_variance(const ResistorPair &pair, double sigma_low,
                                 double sigma_high, SwitchState alice,
                                 SwitchState bob);

}  // namespace kljn

#endif  // KLJN_LINE_HPP_
