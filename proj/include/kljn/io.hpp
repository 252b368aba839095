#ifndef KLJN_IO_HPP_
#define KLJN_IO_HPP_

#include <span>
#include <string>

#include <json.hpp>

#include "kljn/density.hpp"
#include "kljn/eve.hpp"
#include "kljn/protocol.hpp"

namespace kljn {

/// Insertion-ordered JSON so emitted key order is fixed.
using Json = nlohmann::ordered_json;

/// Doubles are printed with 17 significant digits ("%.17g").
std::string format_double(double value);

/// Serializes with fixed key order and 17-significant-digit floats;
/// non-finite numbers become null. Output ends with a newline.
std::string dump_json(const Json &value, int indent = 2);

Json to_json(const SessionConfig &config);
/// Fields absent from `j` keep their value from `defaults`. Throws
/// std::invalid_argument on unknown keys or wrong types.
SessionConfig session_config_from_json(const Json &j, SessionConfig defaults = {});

Json to_json(const VarianceTestResult &r);
Json to_json(const ShapeTestResult &r);
Json to_json(const EveVerdict &verdict);
Json to_json(const AttackSummary &summary);
Json to_json(const SessionOutcome &outcome, bool include_records = true);

/// Columns: bit_index, alice_state, bob_state, level, secure, key_bit,
/// eve_decision. Empty cells for absent values.
std::string bits_csv(const SessionOutcome &outcome);
/// Columns: x, density.
std::string pdf_csv(const PdfGrid &grid);
/// Columns: multiplier, sigma_high, secure_bits, eve_accuracy.
std::string sweep_csv(std::span<const SweepPoint> points);

}  // namespace kljn

#endif  // KLJN_IO_HPP_
