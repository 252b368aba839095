#include "kljn/line.hpp"

#include <stdexcept>
#include <vector>

namespace kljn {

std::string_view to_string(SwitchState state) {
  return state == SwitchState::Low ? "L" : "H";
}

LineTrace::LineTrace(Trace voltage, Trace current)
    : voltage_(std::move(voltage)), current_(std::move(current)) {
  if (voltage_.size() != current_.size()) {
    throw std::domain_error("line voltage and current lengths differ");
  }
}

LineTrace line_signals(const Trace &v_alice, const Trace &v_bob,
                       double r_alice, double r_bob) {
  if (v_alice.size() != v_bob.size()) {
    throw std::domain_error("source traces must have equal length");
  }
  if (!(r_alice > 0.0) || !(r_bob > 0.0)) {
    throw std::domain_error("resistances must be positive");
  }
  const double total = r_alice + r_bob;
  const std::size_t n = v_alice.size();
  std::vector<double> voltage(n);
  std::vector<double> current(n);
  for (std::size_t i = 0; i < n; ++i) {
    voltage[i] = (v_alice[i] * r_bob + v_bob[i] * r_alice) / total;
    current[i] = (v_bob[i] - v_alice[i]) / total;
  }
  return LineTrace(Trace(std::move(voltage)), Trace(std::move(current)));
}

double theoretical_line_variance(const ResistorPair &pair, double sigma_low,
                                 double sigma_high, SwitchState alice,
                                 SwitchState bob) {
  if (!(sigma_low > 0.0) || !(sigma_high > 0.0)) {
    throw std::domain_error("sigmas must be positive");
  }
  auto sigma = [&](SwitchState s) {
    return s == SwitchState::Low ? sigma_low : sigma_high;
  };
  const double r_a = resistance_for(pair, alice);
  const double r_b = resistance_for(pair, bob);
  const double s_a = sigma(alice);
  const double s_b = sigma(bob);
  const double total = r_a + r_b;
  return (s_a * s_a * r_b * r_b + s_b * s_b * r_a * r_a) / (total * total);
}

}  // namespace kljn
