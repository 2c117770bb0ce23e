#pragma once

// Command-line front end. run_cli() is the whole program; main() only forwards
// argv, so tests can drive it in-process.
//
// Exit codes: 0 success, 1 failed check or constants error, 2 bad input,
// 3 scattering budget exceeded.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scatter/scatter.hpp"

namespace scatter::cli {

namespace fs = std::filesystem;
using io::json;

enum ExitCode : int { kOk = 0, kFailed = 1, kBadInput = 2, kBudget = 3 };

struct Tolerances {
  double littlewood_paley = kLittlewoodPaleyTolerance;
  double asymmetry = kAsymmetryTolerance;
  double vanishing_order = kVanishingOrderThreshold;
  double slack = 1e-8;
  double envelope = 1e-9;
  double mc_sigmas = 3.0;

  void set(const std::string& key, double value) {
    if (key == "lp") littlewood_paley = value;
    else if (key == "asymmetry") asymmetry = value;
    else if (key == "vanishing") vanishing_order = value;
    else if (key == "slack") slack = value;
    else if (key == "envelope") envelope = value;
    else if (key == "mc_sigmas") mc_sigmas = value;
    else throw ParseError("unknown tolerance '" + key + "'");
  }
};

struct RunConfig {
  fs::path bank_file;
  fs::path signal_file;
  fs::path model_file;
  fs::path output_dir;
  std::uint64_t seed = 0;
  std::optional<std::size_t> depth;
  std::size_t trials = 2000;
  double prune_eps = 0.0;
  int scale = 0;
  std::string lowpass = "gaussian";
  std::vector<std::string> tolerance_overrides;
  Tolerances tol;
};

inline void apply_overrides(RunConfig& cfg) {
  for (const auto& item : cfg.tolerance_overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("tolerance override must look like key=value: " + item);
    try {
      cfg.tol.set(item.substr(0, eq), std::stod(item.substr(eq + 1)));
    } catch (const std::logic_error&) {
      throw ParseError("bad tolerance value in " + item);
    }
  }
}

inline void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw ParseError(std::string("missing --") + what);
  if (!fs::exists(p)) throw ParseError(std::string(what) + " file not found: " + p.string());
}

inline fs::path prepare_out(const RunConfig& cfg) {
  if (cfg.output_dir.empty()) return {};
  fs::create_directories(cfg.output_dir);
  return cfg.output_dir;
}

inline Signal load_signal_for(const RunConfig& cfg, const FilterBank& bank) {
  require_file(cfg.signal_file, "signal");
  Signal s = io::read_signal(cfg.signal_file);
  if (s.size() != bank.size())
    throw ParseError("signal has " + std::to_string(s.size()) + " samples, bank expects " +
                     std::to_string(bank.size()));
  return s;
}

inline BankAudit audit_with(const FilterBank& bank, const Tolerances& tol) {
  auto fit = estimate_vanishing_order(bank.mother(), tol.vanishing_order);
  return {check_littlewood_paley(bank, tol.littlewood_paley), check_asymmetry(bank, tol.asymmetry),
          to_condition_report(fit, tol.vanishing_order), fit};
}

inline int cmd_bank_check(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.bank_file, "bank");
  const auto bank = io::load_bank(cfg.bank_file).build();
  const auto audit = audit_with(bank, cfg.tol);
  const json report = io::to_json(audit);
  out << report.dump(2) << '\n';
  if (const auto dir = prepare_out(cfg); !dir.empty()) io::write_json(report, dir / "bank_report.json");
  return audit.passed() ? kOk : kFailed;
}

inline std::string path_file_name(const Path& p) {
  std::string s = "S";
  if (p.scales.empty()) return s + "_root.csv";
  for (int j : p.scales) s += "_" + std::to_string(j);
  return s + ".csv";
}

inline int cmd_scatter(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.bank_file, "bank");
  if (cfg.output_dir.empty()) throw ParseError("missing --out");
  const auto bank = io::load_bank(cfg.bank_file).build();
  const Signal f = load_signal_for(cfg, bank);
  const std::size_t depth = cfg.depth.value_or(2);
  LowPass low = cfg.lowpass == "tight"      ? tight_lowpass(bank)
                : cfg.lowpass == "gaussian" ? default_lowpass(bank)
                                            : throw ParseError("--lowpass must be gaussian or tight");
  const auto result = scatter(f, bank, low, depth, cfg.prune_eps);

  const auto dir = prepare_out(cfg);
  fs::create_directories(dir / "paths");
  json paths = json::array();
  for (const auto& node : result.nodes) {
    const std::string file = "paths/" + path_file_name(node.path);
    const Signal& s = *node.output;
    io::write_csv_signal(f.is_real() ? Signal::from_real(s.real_part()) : s, dir / file);
    paths.push_back({{"path", node.path.scales}, {"file", file}, {"u_energy", node.u_energy},
                     {"s_energy", node.s_energy}});
  }
  json manifest = {{"N", bank.size()},
                   {"J", bank.J()},
                   {"j_min", bank.j_min()},
                   {"depth", depth},
                   {"prune_eps", cfg.prune_eps},
                   {"lowpass", cfg.lowpass},
                   {"tight_pair", result.tight_pair},
                   {"input_energy", result.input_energy},
                   {"layer_energies", result.layer_energies},
                   {"output_energies", result.output_energies},
                   {"pruned_mass", result.pruned_mass},
                   {"paths", paths}};
  io::write_json(manifest, dir / "manifest.json");
  std::ofstream prof(dir / "layer_profile.csv");
  prof << "n,energy\n";
  for (std::size_t n = 0; n < result.layer_energies.size(); ++n)
    prof << n << ',' << io::format_double(result.layer_energies[n]) << '\n';
  out << "paths " << result.nodes.size() << ", layer energies:";
  for (double e : result.layer_energies) out << ' ' << io::format_double(e);
  out << '\n';
  return kOk;
}

/// First failing audit condition rendered as a constants error.
inline void require_audit(const BankAudit& audit) {
  using K = ConstantsError::Kind;
  if (!audit.littlewood_paley.passed) throw ConstantsError(K::littlewood_paley, "bank fails the Littlewood-Paley inequality");
  if (!audit.vanishing_order.passed)
    throw ConstantsError(K::vanishing_order, "bank fails the vanishing-order condition (epsilon_hat = " +
                                                 io::format_double(audit.vanishing_fit.epsilon_hat) + ")");
  if (!audit.asymmetry.passed) throw ConstantsError(K::asymmetry, "bank fails the frequency asymmetry condition");
}

inline int cmd_decay(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.bank_file, "bank");
  const auto desc = io::load_bank(cfg.bank_file);
  const auto bank = desc.build();
  const std::size_t n_max = cfg.depth.value_or(4);
  if (n_max < 2 || n_max > 5) throw ParseError("--depth must lie in [2, 5] for decay verify");
  require_audit(audit_with(bank, cfg.tol));
  const auto k = compute_constants(bank, desc.decay);

  Signal f = Signal::zeros(bank.size());
  if (!cfg.signal_file.empty()) {
    f = load_signal_for(cfg, bank);
  } else {
    const int hi = std::min(k.validated_band.hi, static_cast<int>(bank.size() / 2) - 1);
    f = random_bandlimited_real(bank.size(), k.validated_band.lo, hi, cfg.seed);
  }
  const auto rows = verify_decay(f, bank, k, n_max);

  bool ok = true;
  std::string csv = "n,empirical,bound,slack\n";
  for (const auto& r : rows) {
    ok = ok && r.slack >= -cfg.tol.slack;
    csv += std::to_string(r.n) + ',' + io::format_double(r.empirical) + ',' + io::format_double(r.bound) + ',' +
           io::format_double(r.slack) + '\n';
  }
  const json constants = io::to_json(k);
  if (const auto dir = prepare_out(cfg); !dir.empty()) {
    io::write_json(constants, dir / "constants.json");
    std::ofstream(dir / "decay.csv") << csv;
  }
  out << constants.dump(2) << '\n' << csv;
  return ok ? kOk : kFailed;
}

inline int cmd_stationary(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.bank_file, "bank");
  require_file(cfg.model_file, "model");
  const auto desc = io::load_bank(cfg.bank_file);
  const auto bank = desc.build();
  const auto model = io::load_model(cfg.model_file).build();
  if (model.size() != bank.size()) throw ParseError("model N does not match bank N");
  const std::size_t n = cfg.depth.value_or(2);
  require_audit(audit_with(bank, cfg.tol));
  const auto k = compute_constants(bank, desc.decay);
  const auto est = mc_layer_energy(model, bank, n, cfg.trials, cfg.seed);
  const double bound = stationary_bound(model, k, n);
  const bool pass = est.value <= bound + cfg.tol.mc_sigmas * est.std_error;
  const json report = {{"n", n},           {"estimate", est.value}, {"stderr", est.std_error},
                       {"trials", est.trials}, {"seed", est.seed},  {"bound", bound},
                       {"pass", pass}};
  out << report.dump(2) << '\n';
  if (const auto dir = prepare_out(cfg); !dir.empty()) io::write_json(report, dir / "stationary.json");
  return pass ? kOk : kFailed;
}

/// Linear chirp sweeping 1 -> N/16 cycles plus a little seeded noise.
inline Signal default_chirp(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.01);
  const double f0 = 1.0, f1 = static_cast<double>(n) / 16.0;
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    s[k] = std::cos(2 * kPi * (f0 * t + 0.5 * (f1 - f0) * t * t)) + gauss(rng);
  }
  return Signal::from_real(s);
}

/// Energy-weighted mean |w| of a spectrum.
inline double spectral_centroid(const Spectrum& c) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double p = std::norm(c[k]);
    num += std::abs(c.frequency(k)) * p;
    den += p;
  }
  return den > 0.0 ? num / den : 0.0;
}

inline void write_time_series(const fs::path& path, const char* column, const std::vector<double>& v) {
  std::ofstream o(path);
  o << "t," << column << '\n';
  for (std::size_t k = 0; k < v.size(); ++k)
    o << io::format_double(static_cast<double>(k) / static_cast<double>(v.size())) << ',' << io::format_double(v[k])
      << '\n';
}

inline void write_spectrum_magnitude(const fs::path& path, const Spectrum& c) {
  const int n = static_cast<int>(c.size());
  std::ofstream o(path);
  o << "omega,magnitude\n";
  for (int w = -n / 2; w < n / 2; ++w) o << w << ',' << io::format_double(std::abs(c.at(w))) << '\n';
}

inline int cmd_modulus_shift_demo(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.bank_file, "bank");
  if (cfg.output_dir.empty()) throw ParseError("missing --out");
  const auto bank = io::load_bank(cfg.bank_file).build();
  const Signal f = cfg.signal_file.empty() ? default_chirp(bank.size(), cfg.seed) : load_signal_for(cfg, bank);
  const Signal g = convolve(f, bank.filter(cfg.scale));
  const Signal m = modulus(g);
  const Spectrum gh = dft(g), mh = dft(m);

  const auto dir = prepare_out(cfg);
  write_time_series(dir / "a_filtered_real.csv", "real", g.real_part());
  write_spectrum_magnitude(dir / "b_filtered_spectrum.csv", gh);
  write_time_series(dir / "c_modulus.csv", "modulus", m.real_part());
  write_spectrum_magnitude(dir / "d_modulus_spectrum.csv", mh);

  const double before = spectral_centroid(gh), after = spectral_centroid(mh);
  const json summary = {{"j", cfg.scale}, {"centroid_before", before}, {"centroid_after", after},
                        {"shifted_down", after < before}};
  io::write_json(summary, dir / "summary.json");
  out << "centroid before modulus " << io::format_double(before) << ", after " << io::format_double(after) << '\n';
  return kOk;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Wavelet scattering: filter-bank audits, layer-energy decay, stationary experiments"};
  app.name("scatter");
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--bank", cfg.bank_file, "bank description (JSON)");
    sub->add_option("--out", cfg.output_dir, "output directory");
    sub->add_option("--tol", cfg.tolerance_overrides, "tolerance override key=value (lp, asymmetry, vanishing, slack, envelope, mc_sigmas)");
  };

  auto* bank = app.add_subcommand("bank", "filter bank tools")->require_subcommand(1);
  auto* bank_check = bank->add_subcommand("check", "audit the admissibility conditions");
  common(bank_check);

  auto* scat = app.add_subcommand("scatter", "scattering transform")->require_subcommand(1);
  auto* scat_run = scat->add_subcommand("run", "compute and export the scattering tree");
  common(scat_run);
  scat_run->add_option("--signal", cfg.signal_file, "input signal (CSV, or raw with .meta sidecar)");
  scat_run->add_option("--depth", cfg.depth, "maximum path length (default 2)");
  scat_run->add_option("--prune-eps", cfg.prune_eps, "relative energy threshold for pruning");
  scat_run->add_option("--lowpass", cfg.lowpass, "gaussian or tight");

  auto* decay = app.add_subcommand("decay", "layer-energy decay")->require_subcommand(1);
  auto* decay_verify = decay->add_subcommand("verify", "compute constants and compare the bound");
  common(decay_verify);
  decay_verify->add_option("--signal", cfg.signal_file, "input signal; random band-limited if absent");
  decay_verify->add_option("--seed", cfg.seed, "seed of the random signal");
  decay_verify->add_option("--depth", cfg.depth, "largest layer n (2..5, default 4)");

  auto* stat = app.add_subcommand("stationary", "stationary processes")->require_subcommand(1);
  auto* stat_run = stat->add_subcommand("run", "Monte-Carlo layer energy against the bound");
  common(stat_run);
  stat_run->add_option("--model", cfg.model_file, "process model (JSON)");
  stat_run->add_option("--depth", cfg.depth, "layer n (default 2)");
  stat_run->add_option("--trials", cfg.trials, "number of realizations");
  stat_run->add_option("--seed", cfg.seed, "master seed");

  auto* demo = app.add_subcommand("demo", "demonstrations")->require_subcommand(1);
  auto* demo_shift = demo->add_subcommand("modulus-shift", "spectra before and after the modulus");
  common(demo_shift);
  demo_shift->add_option("--signal", cfg.signal_file, "input signal; seeded chirp if absent");
  demo_shift->add_option("--seed", cfg.seed, "seed of the chirp noise");
  demo_shift->add_option("--j", cfg.scale, "wavelet scale");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }

  try {
    apply_overrides(cfg);
    if (bank_check->parsed()) return cmd_bank_check(cfg, out);
    if (scat_run->parsed()) return cmd_scatter(cfg, out);
    if (decay_verify->parsed()) return cmd_decay(cfg, out);
    if (stat_run->parsed()) return cmd_stationary(cfg, out);
    if (demo_shift->parsed()) return cmd_modulus_shift_demo(cfg, out);
    err << app.help();
    return kBadInput;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const ConstantsError& e) {
    err << "constants error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kFailed;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailed;
  }
}

}  // namespace scatter::cli
