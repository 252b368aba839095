#include "kljn/io.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace kljn {

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

namespace {

void dump_into(std::string &out, const Json &value, int indent, int depth) {
  const auto newline = [&](int level) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto &[key, item] : value.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(out, item, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto &item : value) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_into(out, item, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = value.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += value.dump();
      return;
  }
}

template <class T>
T field(const Json &j, const char *key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw std::invalid_argument(fmt::format("config field '{}': {}", key, e.what()));
  }
}

Json optional_bit(const std::optional<int> &bit) {
  return bit ? Json(*bit) : Json(nullptr);
}

}  // namespace

std::string dump_json(const Json &value, int indent) {
  std::string out;
  dump_into(out, value, indent, 0);
  out += '\n';
  return out;
}

Json to_json(const SessionConfig &config) {
  Json j;
  j["pair"] = {{"r_low", config.pair.low()}, {"r_high", config.pair.high()}};
  j["kind"] = std::string(to_string(config.kind));
  j["sigma_low"] = config.sigma_low;
  j["sigma_high"] = config.sigma_high;
  j["samples_per_bit"] = config.samples_per_bit;
  j["bits"] = config.bits;
  j["seed"] = config.seed;
  j["significance"] = config.significance;
  return j;
}

SessionConfig session_config_from_json(const Json &j, SessionConfig defaults) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const char *const kKnown[] = {"pair", "kind", "sigma_low", "sigma_high",
                                       "samples_per_bit", "bits", "seed", "significance"};
  for (const auto &[key, unused] : j.items()) {
    bool known = false;
    for (const char *k : kKnown) known = known || key == k;
    if (!known) throw std::invalid_argument(fmt::format("unknown config field '{}'", key));
  }
  SessionConfig c = defaults;
  try {
    if (j.contains("pair")) {
      const Json &p = j.at("pair");
      const double lo = p.contains("r_low") ? field<double>(p, "r_low") : c.pair.low();
      const double hi = p.contains("r_high") ? field<double>(p, "r_high") : c.pair.high();
      c.pair = ResistorPair(lo, hi);
    }
    if (j.contains("kind")) c.kind = parse_kind(field<std::string>(j, "kind"));
  } catch (const std::domain_error &e) {
    throw std::invalid_argument(e.what());
  }
  if (j.contains("sigma_low")) c.sigma_low = field<double>(j, "sigma_low");
  if (j.contains("sigma_high")) c.sigma_high = field<double>(j, "sigma_high");
  if (j.contains("samples_per_bit")) c.samples_per_bit = field<std::size_t>(j, "samples_per_bit");
  if (j.contains("bits")) c.bits = field<std::size_t>(j, "bits");
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("significance")) c.significance = field<double>(j, "significance");
  return c;
}

Json to_json(const VarianceTestResult &r) {
  Json j;
  j["empirical_variance"] = r.empirical_variance;
  j["expected_variance"] = r.expected_variance;
  j["z"] = r.z;
  j["p_value"] = r.p_value;
  j["reject"] = r.reject;
  return j;
}

Json to_json(const ShapeTestResult &r) {
  Json j;
  j["ks_statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["reject"] = r.reject;
  return j;
}

namespace {

Json to_json(const SourceCheck &c) {
  Json j;
  j["assumed_state"] = std::string(to_string(c.assumed_state));
  j["variance"] = c.variance ? to_json(*c.variance) : Json(nullptr);
  j["shape"] = to_json(c.shape);
  return j;
}

}  // namespace

Json to_json(const EveVerdict &verdict) {
  Json j;
  j["decision"] = std::string(to_string(verdict.decision));
  Json hypotheses = Json::array();
  for (const HypothesisReport &h : verdict.hypotheses) {
    Json entry;
    entry["hypothesis"] = std::string(to_string(h.hypothesis));
    entry["rejected"] = h.rejected;
    entry["alice"] = to_json(h.alice);
    entry["bob"] = to_json(h.bob);
    hypotheses.push_back(std::move(entry));
  }
  j["hypotheses"] = std::move(hypotheses);
  return j;
}

Json to_json(const AttackSummary &summary) {
  Json j;
  j["trials"] = summary.trials;
  j["correct"] = summary.correct;
  j["wrong"] = summary.wrong;
  j["undecided"] = summary.undecided;
  j["accuracy"] = summary.accuracy;
  return j;
}

Json to_json(const SessionOutcome &outcome, bool include_records) {
  Json j;
  j["config"] = to_json(outcome.config);
  Json agg;
  agg["bits"] = outcome.records.size();
  agg["secure_bits"] = outcome.secure_bits;
  agg["key_bits"] = outcome.key_bits;
  agg["discarded_bits"] = outcome.discarded_bits;
  agg["key_disagreements"] = outcome.key_disagreements;
  agg["secure_bit_fraction"] = outcome.secure_bit_fraction;
  agg["bit_error_rate"] = outcome.bit_error_rate;
  agg["key_agreement"] = outcome.key_agreement;
  agg["eve_accuracy"] = outcome.eve_accuracy ? Json(*outcome.eve_accuracy) : Json(nullptr);
  j["aggregates"] = std::move(agg);
  if (include_records) {
    Json records = Json::array();
    for (const BitRecord &r : outcome.records) {
      Json rec;
      rec["bit_index"] = r.index;
      rec["alice_state"] = std::string(to_string(r.alice_state));
      rec["bob_state"] = std::string(to_string(r.bob_state));
      rec["measured_variance"] = r.measured_variance;
      rec["level"] = std::string(to_string(r.level));
      rec["secure"] = r.secure;
      rec["discarded"] = r.discarded;
      rec["alice_bit"] = optional_bit(r.alice_bit);
      rec["bob_bit"] = optional_bit(r.bob_bit);
      rec["key_bit"] = optional_bit(r.key_bit);
      rec["eve_decision"] =
          r.eve_decision ? Json(std::string(to_string(*r.eve_decision))) : Json(nullptr);
      records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
  }
  return j;
}

std::string bits_csv(const SessionOutcome &outcome) {
  std::string out = "bit_index,alice_state,bob_state,level,secure,key_bit,eve_decision\n";
  for (const BitRecord &r : outcome.records) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.index, to_string(r.alice_state),
                       to_string(r.bob_state), to_string(r.level), r.secure ? 1 : 0,
                       r.key_bit ? std::to_string(*r.key_bit) : std::string(),
                       r.eve_decision ? std::string(to_string(*r.eve_decision))
                                      : std::string());
  }
  return out;
}

std::string pdf_csv(const PdfGrid &grid) {
  std::string out = "x,density\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out += format_double(grid.x(i));
    out += ',';
    out += format_double(grid.value(i));
    out += '\n';
  }
  return out;
}

std::string sweep_csv(std::span<const SweepPoint> points) {
  std::string out = "multiplier,sigma_high,secure_bits,eve_accuracy\n";
  for (const SweepPoint &p : points) {
    out += fmt::format("{},{},{},{}\n", format_double(p.multiplier),
                       format_double(p.sigma_high), p.secure_bits,
                       format_double(p.eve_accuracy));
  }
  return out;
}

}  // namespace kljn
