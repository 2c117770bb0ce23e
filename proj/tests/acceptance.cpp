// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cli_app.hpp"
#include "oracles.hpp"

using namespace scatter;
namespace fs = std::filesystem;

namespace {

FilterBank shannon_bank() { return build_bank(shannon_analytic_mother(), 1, -6, 256); }
FilterBank morlet_bank() { return build_bank(morlet_mother(3, 1), 3, -24, 256); }
FilterBank even_bank() { return build_bank(even_real_mother(), 1, -6, 256); }
FilterBank linear_bank() { return build_bank(linear_mother(), 1, -6, 256); }

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail += " (over time budget)";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// F1, F2 from the sampled filters by direct summation over scales.
std::pair<double, double> moments_oracle(const FilterBank& b, int w) {
  double s = 0, m1 = 0, m2 = 0;
  for (int j = b.j_min(); j <= b.J(); ++j) {
    const double p = std::norm(b.response(j, w)), q = std::norm(b.response(j, -w));
    s += 0.5 * (p + q);
    m1 += 0.5 * (p - q) * std::ldexp(1.0, -j);
    m2 += 0.5 * (p + q) * std::ldexp(1.0, -2 * j);
  }
  return {m1 / s, m2 / s};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

int main() {
  const auto shannon = shannon_bank();
  const auto morlet = morlet_bank();

  criterion(1, "tight-frame energy balance", 30, [&] {
    const auto low = tight_lowpass(shannon);
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto f = random_bandlimited_real(256, 1, 127, seed, true);
      const auto r = scatter::scatter(f, shannon, low, 3, 0.0, {Budget{}, false, false});
      // Oracle: ||f||^2 from the samples, layer sums re-added here.
      const double e = oracle::mean_square(f.samples());
      for (std::size_t n = 1; n <= 3; ++n) {
        double lhs = r.layer_energies[n];
        for (std::size_t m = 0; m < n; ++m) lhs += r.output_energies[m];
        worst = std::max(worst, std::abs(lhs - e) / e);
      }
    }
    return Outcome{worst < 1e-8, "max relative defect " + fmt(worst) + " < 1e-8"};
  });

  criterion(2, "admissibility pattern", 5, [&] {
    const auto s = audit_bank(shannon), m = audit_bank(morlet), e = audit_bank(even_bank()), l = audit_bank(linear_bank());
    const bool ok = s.passed() && m.passed() && !e.asymmetry.passed && !l.vanishing_order.passed;
    return Outcome{ok, std::string("shannon ") + (s.passed() ? "pass" : "fail") + ", morlet " +
                           (m.passed() ? "pass" : "fail") + ", even asymmetry " +
                           (e.asymmetry.passed ? "pass" : "fail") + ", linear vanishing " +
                           (l.vanishing_order.passed ? "pass" : "fail")};
  });

  criterion(3, "shannon constants", 5, [&] {
    const auto k = compute_constants(shannon);
    const double err = std::max({std::abs(k.c - 0.5), std::abs(k.C - 1.0), std::abs(k.delta - 0.5),
                                 std::abs(k.a - 2 / std::sqrt(3.0))});
    return Outcome{err < 1e-9, "c=" + fmt(k.c) + " C=" + fmt(k.C) + " delta=" + fmt(k.delta) + " a=" + fmt(k.a) +
                                   ", max error " + fmt(err) + " < 1e-9"};
  });

  criterion(4, "dyadic homogeneity of F1, F2", 0, [&] {
    double worst = 0;
    for (const auto* b : {&shannon, &morlet}) {
      const auto F1 = compute_F1(*b), F2 = compute_F2(*b);
      for (int w = F1.band.lo; 2 * w <= F1.band.hi; ++w) {
        const auto [o1, o2] = moments_oracle(*b, w);
        const auto [p1, p2] = moments_oracle(*b, 2 * w);
        worst = std::max({worst, std::abs(F1.at(2 * w) - 2 * F1.at(w)) / std::abs(2 * F1.at(w)),
                          std::abs(F2.at(2 * w) - 4 * F2.at(w)) / (4 * F2.at(w)),
                          std::abs(F1.at(w) - o1) / std::abs(o1), std::abs(F2.at(w) - o2) / o2,
                          std::abs(p1 - 2 * o1) / std::abs(2 * o1), std::abs(p2 - 4 * o2) / (4 * o2)});
      }
    }
    return Outcome{worst < 1e-10, "max relative error " + fmt(worst) + " < 1e-10"};
  });

  criterion(5, "modulus frequency-shift inequality", 60, [&] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> pick(0, 1);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000; ++t) {
      const auto& b = pick(rng) ? morlet : shannon;
      const int j = b.j_min() + static_cast<int>(u(rng) * b.breadth());
      const Signal f(oracle::random_complex(256, 5000 + t));
      const double x = 0.5 * std::pow(32.0, u(rng)), delta = -8 + 16 * u(rng);
      const auto r = lemma1_check(f, j, x, delta, b);
      // Oracle for the right-hand side with naive transforms.
      const auto fh = oracle::naive_dft(f.samples());
      double rhs = 0;
      for (std::size_t k = 0; k < fh.size(); ++k) {
        const double w = frequency_of(k, 256);
        rhs += std::norm(fh[k] * b.filter(j)[k]) * std::pow(chi_hat(x, w - delta), 2);
      }
      worst = std::min(worst, (r.lhs - rhs) / oracle::mean_square(f.samples()));
    }
    return Outcome{worst >= -1e-10, "min (lhs - rhs)/||f||^2 = " + fmt(worst) + " >= -1e-10"};
  });

  criterion(6, "envelope inequality chain", 0, [&] {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto* b : {&shannon, &morlet}) {
      const auto k = compute_constants(*b);
      for (int n = 2; n <= 5; ++n)
        worst = std::min(worst, lemma2_envelope_check(*b, k.r * std::pow(k.a, n), k).margin);
    }
    return Outcome{worst >= -1e-9, "min margin " + fmt(worst) + " >= -1e-9"};
  });

  criterion(7, "layer-energy decay bound", 600, [&] {
    const auto k = compute_constants(shannon);
    double worst = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto f = random_bandlimited_real(256, 1, 127, seed);
      const auto rows = verify_decay(f, shannon, k, 4);
      // Oracle bound: ||f||^2 - ||f * chi||^2 by direct convolution.
      for (const auto& row : rows) {
        const double x = k.r * std::pow(k.a, static_cast<double>(row.n));
        const auto smooth = oracle::direct_circular_convolution(f.samples(), gaussian_lowpass(x, 256).coeffs());
        const double bound = oracle::mean_square(f.samples()) - oracle::mean_square(smooth);
        worst = std::min(worst, bound + 1e-8 - row.empirical);
      }
      for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].empirical <= rows[i - 1].empirical;
    }
    return Outcome{worst >= 0 && monotone,
                   "min (bound + 1e-8 - empirical) " + fmt(worst) + ", nonincreasing " + (monotone ? "yes" : "no")};
  });

  criterion(8, "stationary bound", 600, [&] {
    const auto k = compute_constants(shannon);
    const std::uint64_t seed = 7;
    bool ok = true;
    std::string detail;
    for (const auto& model : {make_white(1.0, 256), make_filtered_noise(1.0, band_indicator(256, 8, 60))}) {
      const auto est = mc_layer_energies(model, shannon, 3, 2000, seed);
      // Oracle for layer 1: sum_j sum_w R_hat(w) |psi_j(w)|^2.
      double analytic = 0;
      for (int j = shannon.j_min(); j <= shannon.J(); ++j)
        for (std::size_t i = 0; i < 256; ++i)
          analytic += model.spectral_density[i].real() * std::norm(shannon.filter(j)[i]);
      ok = ok && std::abs(est[1].value - analytic) <= 3 * est[1].std_error;
      detail += std::string(to_string(model.kind)) + ": layer1 " + fmt(est[1].value) + " vs " + fmt(analytic);
      for (std::size_t n = 2; n <= 3; ++n) {
        const double bound = stationary_bound(model, k, n);
        ok = ok && est[n].value <= bound + 3 * est[n].std_error;
        detail += ", n=" + std::to_string(n) + " " + fmt(est[n].value) + " <= " + fmt(bound);
      }
      detail += "; ";
    }
    return Outcome{ok, detail};
  });

  criterion(9, "modulus lowers the spectral centroid", 0, [&] {
    const auto dir = fs::temp_directory_path() / "scatter_acceptance_demo";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
      std::ofstream(dir / "morlet.json")
          << R"({"mother": {"name": "morlet", "params": {"xi0": 3, "sigma": 1}}, "J": 3, "j_min": -24, "N": 256})";
    }
    std::ostringstream sink;
    const auto args = [&](const char* out) {
      return std::vector<std::string>{"demo", "modulus-shift", "--bank", (dir / "morlet.json").string(),
                                      "--j", "0", "--seed", "1", "--out", (dir / out).string()};
    };
    if (cli::run_cli(args("a"), sink, sink) != 0 || cli::run_cli(args("b"), sink, sink) != 0)
      return Outcome{false, "demo failed: " + sink.str()};
    bool stable = true;
    for (const char* f : {"a_filtered_real.csv", "b_filtered_spectrum.csv", "c_modulus.csv", "d_modulus_spectrum.csv"})
      stable = stable && !slurp(dir / "a" / f).empty() && slurp(dir / "a" / f) == slurp(dir / "b" / f);
    // Oracle centroids from the chirp itself, transformed naively.
    const auto f = cli::default_chirp(256, 1);
    const auto g = oracle::direct_circular_convolution(f.samples(), morlet.filter(0).coeffs());
    std::vector<oracle::cplx> m(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) m[i] = std::abs(g[i]);
    auto centroid = [](const std::vector<oracle::cplx>& c) {
      double num = 0, den = 0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        num += std::abs(frequency_of(i, c.size())) * std::norm(c[i]);
        den += std::norm(c[i]);
      }
      return num / den;
    };
    const double before = centroid(oracle::naive_dft(g)), after = centroid(oracle::naive_dft(m));
    const auto summary = io::load_json(dir / "a" / "summary.json");
    const bool agrees = std::abs(summary["centroid_before"].get<double>() - before) < 1e-9 * before &&
                        std::abs(summary["centroid_after"].get<double>() - after) < 1e-9 * before;
    return Outcome{after < before && stable && agrees, "centroid " + fmt(before) + " -> " + fmt(after) +
                                                           ", byte-stable " + (stable ? "yes" : "no")};
  });

  std::printf("%s: %d failing\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
