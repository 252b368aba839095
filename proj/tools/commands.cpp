#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "kljn/density.hpp"
#include "kljn/eve.hpp"
#include "kljn/io.hpp"
#include "kljn/protocol.hpp"

namespace kljn::cli {

namespace {

namespace fs = std::filesystem;

/// Bad flags or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string &data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

/// Collects output files and writes them, plus manifest.json, to one dir.
class OutputDir {
 public:
  explicit OutputDir(std::string dir) : dir_(std::move(dir)) {}

  bool enabled() const { return !dir_.empty(); }

  void add(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
  }

  void write(const std::string &command, const Json &config, std::uint64_t seed) const {
    if (!enabled()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", dir_, ec.message()));
    Json outputs = Json::array();
    for (const auto &[name, content] : files_) {
      write_file(name, content);
      outputs.push_back({{"file", name}, {"sha256", sha256_hex(content)}});
    }
    Json manifest;
    manifest["command"] = command;
    manifest["tool_version"] = kToolVersion;
    manifest["seed"] = seed;
    manifest["config"] = config;
    manifest["outputs"] = std::move(outputs);
    write_file("manifest.json", dump_json(manifest));
  }

 private:
  void write_file(const std::string &name, const std::string &content) const {
    const fs::path path = fs::path(dir_) / name;
    std::ofstream file(path, std::ios::binary);
    file << content;
    if (!file) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  }

  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

Json read_config_file(const std::string &path) {
  std::ifstream file(path);
  if (!file) throw UsageError(fmt::format("cannot open config file '{}'", path));
  try {
    return Json::parse(file);
  } catch (const nlohmann::json::parse_error &e) {
    throw UsageError(fmt::format("config file '{}' is not valid JSON: {}", path, e.what()));
  }
}

/// Flags shared by every command.
struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  bool json = false;
  bool csv = false;
  CLI::Option *seed_opt = nullptr;

  void attach(CLI::App *app) {
    app->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    seed_opt = app->add_option("--seed", seed, "64-bit RNG seed");
    app->add_option("--out", out_dir, "Directory for output files and manifest");
    app->add_flag("--json", json, "Print JSON to stdout (default)");
    app->add_flag("--csv", csv, "Emit CSV output");
  }
};

/// Session parameters as flags; values override the config file.
struct SessionFlags {
  double r_low = 0.0, r_high = 0.0, sigma_low = 0.0, sigma_high = 0.0;
  double significance = 0.0;
  std::string kind;
  std::size_t samples_per_bit = 0, bits = 0;
  CLI::Option *r_low_opt, *r_high_opt, *sigma_low_opt, *sigma_high_opt, *sig_opt,
      *kind_opt, *spb_opt, *bits_opt;

  void attach(CLI::App *app) {
    r_low_opt = app->add_option("--r-low", r_low, "Low resistance (ohm)");
    r_high_opt = app->add_option("--r-high", r_high, "High resistance (ohm)");
    kind_opt = app->add_option("--kind", kind, "gaussian | uniform | cauchy");
    sigma_low_opt = app->add_option("--sigma-low", sigma_low, "Low-resistor source scale (V)");
    sigma_high_opt = app->add_option("--sigma-high", sigma_high,
                                     "High-resistor source scale (V); default sigma_low*sqrt(r_high/r_low)");
    spb_opt = app->add_option("--samples-per-bit", samples_per_bit, "Samples per bit exchange");
    bits_opt = app->add_option("--bits", bits, "Number of bit exchanges");
    sig_opt = app->add_option("--significance", significance, "Eve's test significance");
  }

  /// Config file contents with every given flag layered on top.
  Json merged(const CommonFlags &common) const {
    Json j = common.config_path.empty() ? Json::object() : read_config_file(common.config_path);
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    if (r_low_opt->count()) j["pair"]["r_low"] = r_low;
    if (r_high_opt->count()) j["pair"]["r_high"] = r_high;
    if (kind_opt->count()) j["kind"] = kind;
    if (sigma_low_opt->count()) j["sigma_low"] = sigma_low;
    if (sigma_high_opt->count()) j["sigma_high"] = sigma_high;
    if (spb_opt->count()) j["samples_per_bit"] = samples_per_bit;
    if (bits_opt->count()) j["bits"] = bits;
    if (sig_opt->count()) j["significance"] = significance;
    if (common.seed_opt->count()) j["seed"] = common.seed;
    return j;
  }

  /// defaults < config file < flags. sigma_high, when never given, is the
  /// secure amplitude for the resolved pair and sigma_low.
  SessionConfig resolve(const CommonFlags &common) const {
    const Json merged = this->merged(common);
    try {
      SessionConfig c = session_config_from_json(merged);
      if (!merged.contains("sigma_high")) c.sigma_high = scaled_sigma_high(c.pair, c.sigma_low);
      c.validate();
      return c;
    } catch (const std::invalid_argument &e) {
      throw UsageError(e.what());
    } catch (const std::domain_error &e) {
      throw UsageError(e.what());
    }
  }
};

int cmd_simulate(const CommonFlags &common, const SessionFlags &flags, bool records,
                 std::ostream &out) {
  const SessionConfig config = flags.resolve(common);
  const SessionOutcome outcome = run_session(config);
  OutputDir dir(common.out_dir);
  dir.add("session.json", dump_json(to_json(outcome, true)));
  if (common.csv) dir.add("bits.csv", bits_csv(outcome));
  dir.write("simulate", to_json(config), config.seed);
  if (common.csv && !dir.enabled()) {
    out << bits_csv(outcome);
  } else {
    out << dump_json(to_json(outcome, records));
  }
  return kOk;
}

struct AttackFlags {
  std::size_t samples = 10000;
  std::size_t trials = 1000;
  double mismatch = 1.0;
  CLI::Option *mismatch_opt = nullptr;
};

int cmd_attack(const CommonFlags &common, const SessionFlags &flags,
               const AttackFlags &attack, std::ostream &out) {
  if (attack.trials == 0) throw UsageError("--trials must be at least 1");
  if (attack.samples < kMinTestSamples) throw UsageError("--samples must be at least 100");
  if (!(attack.mismatch > 0.0)) throw UsageError("--mismatch must be positive");
  if (attack.mismatch_opt->count() && flags.sigma_high_opt->count()) {
    throw UsageError("--mismatch and --sigma-high are mutually exclusive");
  }
  const Json merged = flags.merged(common);
  SessionConfig base;
  try {
    base = session_config_from_json(merged);
    if (!merged.contains("sigma_high")) {
      base.sigma_high = attack.mismatch * scaled_sigma_high(base.pair, base.sigma_low);
    }
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  } catch (const std::domain_error &e) {
    throw UsageError(e.what());
  }
  if (!(base.sigma_low > 0.0) || !(base.sigma_high > 0.0)) {
    throw UsageError("sigmas must be positive");
  }
  if (!(base.significance > 0.0 && base.significance < 1.0)) {
    throw UsageError("significance must lie in (0, 1)");
  }
  const AttackTrialConfig config{base.pair,         base.kind,      base.sigma_low,
                                 base.sigma_high,   attack.samples, attack.trials,
                                 base.significance, base.seed};
  const AttackSummary summary = run_attack_trials(config);

  Json resolved;
  resolved["pair"] = {{"r_low", config.pair.low()}, {"r_high", config.pair.high()}};
  resolved["kind"] = std::string(to_string(config.kind));
  resolved["sigma_low"] = config.sigma_low;
  resolved["sigma_high"] = config.sigma_high;
  resolved["secure_ratio"] = security_sigma_ratio(config.pair);
  resolved["samples"] = config.samples;
  resolved["trials"] = config.trials;
  resolved["significance"] = config.significance;
  resolved["seed"] = config.seed;
  Json report;
  report["command"] = "attack";
  report["config"] = resolved;
  report["summary"] = to_json(summary);
  const std::string text = dump_json(report);

  OutputDir dir(common.out_dir);
  dir.add("attack.json", text);
  dir.write("attack", resolved, config.seed);
  out << text;
  return kOk;
}

struct PdfFlags {
  double dx = 0.0;
  double support = 0.0;
  CLI::Option *dx_opt = nullptr;
  CLI::Option *support_opt = nullptr;
};

int cmd_pdf(const CommonFlags &common, const SessionFlags &flags, const PdfFlags &pdf,
            std::ostream &out) {
  if (pdf.dx_opt->count() && !(pdf.dx > 0.0 && std::isfinite(pdf.dx))) {
    throw UsageError("--dx must be positive");
  }
  if (pdf.support_opt->count() && !(pdf.support > 0.0 && std::isfinite(pdf.support))) {
    throw UsageError("--support must be positive");
  }
  const Json merged = flags.merged(common);
  SessionConfig c;
  HypothesisWeights w{};
  try {
    c = session_config_from_json(merged);
    if (!merged.contains("sigma_high")) c.sigma_high = scaled_sigma_high(c.pair, c.sigma_low);
    w = weights(c.pair, c.sigma_low, c.sigma_high);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  } catch (const std::domain_error &e) {
    throw UsageError(e.what());
  }

  GridPolicy policy =
      c.kind == DistributionKind::Cauchy ? cauchy_grid_policy() : GridPolicy{};
  if (pdf.support_opt->count()) policy.support_scales = pdf.support;
  if (pdf.dx_opt->count()) {
    policy.dx = pdf.dx;
  } else if (c.kind == DistributionKind::Cauchy) {
    policy.dx = std::min(w.alpha, w.beta) / 10.0;
  } else {
    policy.dx = std::min(w.alpha, w.beta) / 200.0;
  }

  const PdfGrid mixture = convolve_scaled(c.kind, w, policy);
  const double dx = *policy.dx;
  const double half_width = policy.support_scales * std::max(std::hypot(w.alpha, w.beta), c.sigma_high);
  const auto k = static_cast<std::size_t>(std::ceil(half_width / dx - 1e-9));

  Json summary;
  summary["command"] = "pdf";
  summary["kind"] = std::string(to_string(c.kind));
  summary["pair"] = {{"r_low", c.pair.low()}, {"r_high", c.pair.high()}};
  summary["sigma_low"] = c.sigma_low;
  summary["sigma_high"] = c.sigma_high;
  summary["alpha"] = w.alpha;
  summary["beta"] = w.beta;
  summary["dx"] = dx;
  summary["support_scales"] = policy.support_scales;
  if (c.kind == DistributionKind::Cauchy) {
    const CauchyClosure closure = cauchy_closure(w, 1.0, policy);
    summary["closure_residual"] = closure.quadrature_residual;
    summary["additive_scale_residual"] = closure.additive_residual;
  } else {
    summary["mixture_variance"] = mixture.second_moment();
    summary["closure_residual"] = closure_residual(c.kind, w, policy);
  }

  std::string csv = "x,p_a,p_h\n";
  for (std::size_t i = 0; i <= 2 * k; ++i) {
    const double x = (static_cast<double>(i) - static_cast<double>(k)) * dx;
    csv += fmt::format("{},{},{}\n", format_double(x), format_double(mixture.at(x)),
                       format_double(density_value(c.kind, c.sigma_high, x)));
  }
  const std::string text = dump_json(summary);

  OutputDir dir(common.out_dir);
  dir.add("pdf.csv", csv);
  dir.add("pdf.json", text);
  dir.write("pdf", summary, 0);
  out << (common.csv && !dir.enabled() ? csv : text);
  return kOk;
}

int cmd_sweep(const CommonFlags &common, const SessionFlags &flags,
              const std::vector<double> &multipliers, std::ostream &out) {
  if (multipliers.empty()) throw UsageError("--multipliers needs at least one value");
  for (double m : multipliers) {
    if (!(m > 0.0) || !std::isfinite(m)) throw UsageError("multipliers must be positive");
  }
  const SessionConfig base = flags.resolve(common);
  SessionConfig probe = base;
  for (double m : multipliers) {
    probe.sigma_high = m * base.sigma_low * security_sigma_ratio(base.pair);
    try {
      probe.validate();
    } catch (const std::domain_error &e) {
      throw UsageError(fmt::format("multiplier {}: {}", m, e.what()));
    }
  }
  const std::vector<SweepPoint> points = leak_sweep(base, multipliers);
  const std::string csv = sweep_csv(points);

  Json resolved = to_json(base);
  resolved.erase("sigma_high");
  resolved["multipliers"] = multipliers;

  OutputDir dir(common.out_dir);
  dir.add("sweep.csv", csv);
  dir.write("sweep", resolved, base.seed);
  if (common.json) {
    Json report;
    report["command"] = "sweep";
    report["config"] = resolved;
    Json rows = Json::array();
    for (const SweepPoint &p : points) {
      rows.push_back({{"multiplier", p.multiplier},
                      {"sigma_high", p.sigma_high},
                      {"secure_bits", p.secure_bits},
                      {"eve_accuracy", p.eve_accuracy}});
    }
    report["points"] = std::move(rows);
    out << dump_json(report);
  } else {
    out << csv;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"KLJN key-exchange simulator and eavesdropper analysis", "kljn"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonFlags sim_common, attack_common, pdf_common, sweep_common;
  SessionFlags sim_flags, attack_flags, pdf_flags, sweep_flags;

  auto *simulate = app.add_subcommand("simulate", "Run a key-exchange session");
  sim_common.attach(simulate);
  sim_flags.attach(simulate);
  bool records = false;
  simulate->add_flag("--records", records, "Include per-bit records in stdout JSON");

  auto *attack = app.add_subcommand("attack", "Repeat Eve's attack on mixed-state bits");
  attack_common.attach(attack);
  attack_flags.attach(attack);
  AttackFlags attack_opts;
  attack->add_option("--samples,-n", attack_opts.samples, "Samples per attacked bit");
  attack->add_option("--trials", attack_opts.trials, "Number of attacked bits");
  attack_opts.mismatch_opt = attack->add_option(
      "--mismatch", attack_opts.mismatch,
      "sigma_high as a multiple of the secure amplitude (when --sigma-high is absent)");

  auto *pdf = app.add_subcommand("pdf", "Tabulate p_A(x) against p_H(x)");
  pdf_common.attach(pdf);
  pdf_flags.attach(pdf);
  PdfFlags pdf_opts;
  pdf_opts.dx_opt = pdf->add_option("--dx", pdf_opts.dx, "Grid step (V)");
  pdf_opts.support_opt =
      pdf->add_option("--support", pdf_opts.support, "Grid half-width in scale units");

  auto *sweep = app.add_subcommand("sweep", "Eve's accuracy against amplitude mismatch");
  sweep_common.attach(sweep);
  sweep_flags.attach(sweep);
  std::vector<double> multipliers;
  sweep->add_option("--multipliers", multipliers, "Comma-separated sigma_high multipliers")
      ->delimiter(',')
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    std::ostringstream out_buf, err_buf;
    const int code = app.exit(e, out_buf, err_buf);
    out << out_buf.str();
    err << err_buf.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim_common, sim_flags, records, out);
    if (attack->parsed()) return cmd_attack(attack_common, attack_flags, attack_opts, out);
    if (pdf->parsed()) return cmd_pdf(pdf_common, pdf_flags, pdf_opts, out);
    if (sweep->parsed()) return cmd_sweep(sweep_common, sweep_flags, multipliers, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace kljn::cli
