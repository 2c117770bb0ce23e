#pragma once

// Circular-stationary Gaussian processes on the sample grid and Monte-Carlo
// estimates of their expected scattering layer energies.
//
// The spectral density is the transform of the autocovariance in the same
// unit-weight convention as dft(): R_hat(w) = (1/N) sum_k R(k) e^{-2 pi i w k / N},
// so E(mean square of X - E X) = sum_w R_hat(w) = R(0).

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "scatter/decay.hpp"
#include "scatter/filterbank.hpp"
#include "scatter/parallel.hpp"
#include "scatter/scattering.hpp"
#include "scatter/signal.hpp"

namespace scatter {

enum class ModelKind { white, ar1, filtered_noise };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::white: return "white";
    case ModelKind::ar1: return "ar1";
    case ModelKind::filtered_noise: return "filtered_noise";
  }
  return "unknown";
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "white") return ModelKind::white;
  if (s == "ar1") return ModelKind::ar1;
  if (s == "filtered_noise") return ModelKind::filtered_noise;
  throw InvalidArgument("unknown model kind '" + s + "'");
}

struct StationaryModel {
  ModelKind kind;
  double mean = 0.0;
  std::vector<double> autocov;  // R(k), k = 0..N-1
  Spectrum spectral_density;

  std::size_t size() const noexcept { return autocov.size(); }
};

inline StationaryModel model_from_density(ModelKind kind, Spectrum density, double mean) {
  const std::size_t n = density.size();
  for (std::size_t k = 0; k < n; ++k) {
    const cplx z = density[k];
    if (!(z.real() >= -1e-12) || std::abs(z.imag()) > 1e-12 || !std::isfinite(z.real()))
      throw InvalidArgument("spectral density must be real and nonnegative");
    if (std::abs(z - density[mirror_index(k, n)]) > 1e-12)
      throw InvalidArgument("spectral density of a real process must be even");
  }
  if (!std::isfinite(mean)) throw InvalidArgument("mean must be finite");
  return {kind, mean, idft(density).real_part(), std::move(density)};
}

/// R_hat == sigma^2.
inline StationaryModel make_white(double sigma, std::size_t n, double mean = 0.0) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  return model_from_density(ModelKind::white, Spectrum::from_function(n, [&](double) { return sigma * sigma; }), mean);
}

/// Circular AR(1): R_hat(w) = sigma^2 (1 - rho^2) / |1 - rho e^{-2 pi i w / N}|^2.
inline StationaryModel make_ar1(double sigma, double rho, std::size_t n, double mean = 0.0) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  if (!(std::abs(rho) < 1.0)) throw InvalidArgument("ar1 requires |rho| < 1");
  require_grid_size(n);
  const double dn = static_cast<double>(n);
  return model_from_density(ModelKind::ar1, Spectrum::from_function(n, [&](double w) {
                              const double th = 2 * kPi * w / dn;
                              return sigma * sigma * (1 - rho * rho) / (1 - 2 * rho * std::cos(th) + rho * rho);
                            }),
                            mean);
}

/// White noise shaped by h: R_hat = sigma^2 |h_hat|^2.
inline StationaryModel make_filtered_noise(double sigma, const Spectrum& h, double mean = 0.0) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  std::vector<cplx> d(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) d[k] = sigma * sigma * std::norm(h[k]);
  return model_from_density(ModelKind::filtered_noise, Spectrum(std::move(d)), mean);
}

/// Indicator of lo <= |w| <= hi.
inline Spectrum band_indicator(std::size_t n, int lo, int hi) {
  return Spectrum::from_function(n, [&](double w) { return std::abs(w) >= lo && std::abs(w) <= hi ? 1.0 : 0.0; });
}

/// Parameters: white {sigma, mean}; ar1 {sigma, rho, mean}; filtered_noise
/// {sigma, mean} plus either {lo, hi} (band indicator) or {width} (h_hat = chi_hat_width).
inline StationaryModel make_model(ModelKind kind, const std::map<std::string, double>& params, std::size_t n) {
  auto get = [&](const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  const double sigma = get("sigma", 1.0), mean = get("mean", 0.0);
  switch (kind) {
    case ModelKind::white: return make_white(sigma, n, mean);
    case ModelKind::ar1: return make_ar1(sigma, get("rho", 0.0), n, mean);
    case ModelKind::filtered_noise:
      if (params.contains("width")) return make_filtered_noise(sigma, gaussian_lowpass(get("width", 1.0), n), mean);
      if (params.contains("lo") && params.contains("hi")) {
        const double lo = get("lo", 0), hi = get("hi", 0);
        if (lo != std::floor(lo) || hi != std::floor(hi) || lo < 0 || lo > hi)
          throw InvalidArgument("filtered_noise band must be integers with 0 <= lo <= hi");
        return make_filtered_noise(sigma, band_indicator(n, static_cast<int>(lo), static_cast<int>(hi)), mean);
      }
      throw InvalidArgument("filtered_noise needs either width or lo and hi");
  }
  throw InvalidArgument("unknown model kind");
}

/// Generator of trial `trial` under master seed `seed`.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

/// One realization by spectral synthesis: independent complex Gaussians with
/// E|c_w|^2 = R_hat(w), Hermitian symmetric, real at 0 and at Nyquist.
inline Signal simulate_one(const StationaryModel& model, std::uint64_t seed, std::uint64_t trial) {
  const std::size_t n = model.size();
  auto rng = trial_rng(seed, trial);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto& d = model.spectral_density;
  std::vector<cplx> c(n);
  c[0] = model.mean + std::sqrt(std::max(0.0, d[0].real())) * gauss(rng);
  c[n / 2] = std::sqrt(std::max(0.0, d[n / 2].real())) * gauss(rng);
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double g1 = gauss(rng), g2 = gauss(rng);
    const cplx z = std::sqrt(std::max(0.0, d[k].real()) / 2) * cplx(g1, g2);
    c[k] = z;
    c[n - k] = std::conj(z);
  }
  return Signal::from_real(idft(Spectrum(std::move(c))).real_part());
}

inline std::vector<Signal> simulate(const StationaryModel& model, std::size_t trials, std::uint64_t seed) {
  std::vector<Signal> out;
  out.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) out.push_back(simulate_one(model, seed, t));
  return out;
}

/// E(|Y * h|^2) = |E(Y) h_hat(0)|^2 + sum_w |h_hat(w)|^2 R_hat(w).
inline double expected_filter_energy(const StationaryModel& model, const Spectrum& h) {
  if (h.size() != model.size()) throw LengthMismatch(model.size(), h.size());
  double acc = std::norm(model.mean * h[0]);
  for (std::size_t k = 0; k < h.size(); ++k) acc += std::norm(h[k]) * model.spectral_density[k].real();
  return acc;
}

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMaxStationaryDepth = 4;

/// Per layer n = 0..n_max: mean over trials of sum_{|p|=n} ||U[p]X||^2 and its
/// standard error. Trials run concurrently; each uses its own seeded stream.
inline std::vector<MCEstimate> mc_layer_energies(const StationaryModel& model, const FilterBank& bank,
                                                 std::size_t n_max, std::size_t trials, std::uint64_t seed,
                                                 const Budget& budget = {}) {
  if (n_max > kMaxStationaryDepth) throw InvalidArgument("stationary layer depth must be <= 4");
  if (trials < 2) throw InvalidArgument("at least two trials are required");
  if (model.size() != bank.size()) throw LengthMismatch(bank.size(), model.size());
  enforce_budget(bank.breadth(), n_max, budget);
  std::vector<std::vector<double>> per_trial(trials);
  parallel_for(trials, [&](std::size_t t) {
    per_trial[t] = layer_energy_profile(simulate_one(model, seed, t), bank, n_max, budget, 1);
  });
  std::vector<MCEstimate> out(n_max + 1);
  const double T = static_cast<double>(trials);
  for (std::size_t n = 0; n <= n_max; ++n) {
    double mean = 0.0;
    for (const auto& p : per_trial) mean += p[n];
    mean /= T;
    double ss = 0.0;
    for (const auto& p : per_trial) ss += (p[n] - mean) * (p[n] - mean);
    out[n] = {mean, std::sqrt(ss / (T - 1) / T), trials, seed};
  }
  return out;
}

inline MCEstimate mc_layer_energy(const StationaryModel& model, const FilterBank& bank, std::size_t n,
                                  std::size_t trials, std::uint64_t seed, const Budget& budget = {}) {
  return mc_layer_energies(model, bank, n, trials, seed, budget)[n];
}

/// sum_w R_hat(w) (1 - chi_hat_{r a^n}(w)^2); the mean term cancels since chi_hat(0) = 1.
inline double stationary_bound(const StationaryModel& model, const DecayConstants& k, std::size_t n) {
  const double x = k.r * std::pow(k.a, static_cast<double>(n));
  double acc = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double g = chi_hat(x, frequency_of(i, model.size()));
    acc += model.spectral_density[i].real() * (1 - g * g);
  }
  return acc;
}

}  // namespace scatter
