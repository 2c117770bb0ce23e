#pragma once

// Frequency functionals of a filter bank and the constants of the layer-energy
// decay bound  sum_{|p|=n} ||U[p]f||^2 <= ||f||^2 - ||f * chi_{r a^n}||^2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "scatter/filterbank.hpp"
#include "scatter/scattering.hpp"
#include "scatter/signal.hpp"

namespace scatter {

/// Values of a functional on the positive grid frequencies of a band.
struct FreqFunctional {
  std::vector<double> values;
  Band band;

  double at(int w) const {
    if (!band.contains(w)) throw InvalidArgument("frequency " + std::to_string(w) + " outside the band");
    return values[static_cast<std::size_t>(w - band.lo)];
  }
};

namespace detail {

inline Band require_band(const FilterBank& bank) {
  const Band band = validated_band(bank);
  if (band.empty()) throw ConstantsError(ConstantsError::Kind::empty_band, "validated band is empty");
  return band;
}

template <typename Fn>
FreqFunctional tabulate(const FilterBank& bank, Fn&& fn) {
  const Band band = require_band(bank);
  FreqFunctional out{{}, band};
  for (int w = band.lo; w <= band.hi; ++w) {
    const auto m = scale_moments(bank, w);
    if (!(m.s > 1e-12))
      throw ConstantsError(ConstantsError::Kind::coverage_hole,
                           "S vanishes at frequency " + std::to_string(w) + " inside the validated band");
    out.values.push_back(fn(m));
  }
  return out;
}

}  // namespace detail

/// S(w) = (1/2) sum_j (|psi_j(w)|^2 + |psi_j(-w)|^2).
inline FreqFunctional compute_S(const FilterBank& bank) {
  return detail::tabulate(bank, [](const ScaleMoments& m) { return m.s; });
}

/// F1(w) = sum_j (|psi_j(w)|^2 - |psi_j(-w)|^2) / (2 S(w)) 2^-j.
inline FreqFunctional compute_F1(const FilterBank& bank) {
  return detail::tabulate(bank, [](const ScaleMoments& m) { return m.m1 / m.s; });
}

/// F2(w) = sum_j (|psi_j(w)|^2 + |psi_j(-w)|^2) / (2 S(w)) 2^-2j.
inline FreqFunctional compute_F2(const FilterBank& bank) {
  return detail::tabulate(bank, [](const ScaleMoments& m) { return m.m2 / m.s; });
}

struct DecayOptions {
  std::size_t octave_samples = 2048;  // 1 = the octave's base point only
  double probe = 1e-12;               // relative offset of the one-sided probes
};

struct OctaveBounds {
  double c = 0.0;
  double C = 0.0;
  double omega_a = 0.0;
  double c_witness = 0.0;
  double C_witness = 0.0;
  std::size_t samples = 0;
};

/// c = min F1(w)/w and C = max F2(w)/w^2 over the octave [w_a, 2 w_a], where
/// w_a is the lowest validated grid frequency whose double is also validated.
inline OctaveBounds octave_bounds(const FilterBank& bank, const DecayOptions& opts = {}) {
  if (opts.octave_samples == 0) throw InvalidArgument("octave_samples must be positive");
  const Band band = detail::require_band(bank);
  if (2 * band.lo > band.hi)
    throw ConstantsError(ConstantsError::Kind::empty_band, "validated band [" + std::to_string(band.lo) + ", " +
                                                              std::to_string(band.hi) + "] holds no full octave");
  const double wa = band.lo;

  std::vector<double> pts;
  if (opts.octave_samples == 1) {
    pts.push_back(wa);
  } else {
    const auto k = opts.octave_samples;
    for (std::size_t i = 0; i < k; ++i) pts.push_back(wa * std::exp2(static_cast<double>(i) / static_cast<double>(k - 1)));
    for (int w = band.lo; w <= band.hi; ++w) {
      double v = w;
      while (v > 2 * wa) v /= 2;
      pts.push_back(v);
    }
    const std::size_t base = pts.size();
    for (std::size_t i = 0; i < base; ++i) {
      pts.push_back(pts[i] * (1 - opts.probe));
      pts.push_back(pts[i] * (1 + opts.probe));
    }
  }

  OctaveBounds ob;
  ob.omega_a = wa;
  ob.samples = pts.size();
  ob.c = std::numeric_limits<double>::infinity();
  ob.C = -std::numeric_limits<double>::infinity();
  for (double w : pts) {
    const auto m = scale_moments(bank, w);
    if (!(m.s > 1e-12))
      throw ConstantsError(ConstantsError::Kind::coverage_hole, "S vanishes inside the sampled octave");
    const double f1 = m.m1 / m.s / w, f2 = m.m2 / m.s / (w * w);
    if (f1 < ob.c) ob.c = f1, ob.c_witness = w;
    if (f2 > ob.C) ob.C = f2, ob.C_witness = w;
  }
  return ob;
}

// Seed of the initialization low-pass: gamma_hat(nu) = (4/sqrt3) cos^2(2 pi nu)
// on |nu| <= 1/4, so int gamma_hat^2 = 1.
inline double gamma_hat(double nu) {
  if (std::abs(nu) > 0.25) return 0.0;
  const double c = std::cos(2 * kPi * nu);
  return 4.0 / std::sqrt(3.0) * c * c;
}

/// Transform of gamma^2: the autocorrelation of gamma_hat, supported on |w| <= 1/2.
inline double phi0_hat(double w) {
  const double u = std::abs(w);
  if (u >= 0.5) return 0.0;
  const double len = 0.5 - u;
  return 4.0 / 3.0 * (len * (1 + std::cos(4 * kPi * u) / 2) + 3.0 / (8 * kPi) * std::sin(4 * kPi * u));
}

struct InitLowpassConstruction {
  Spectrum gamma;  // gamma_hat on the grid
  Spectrum phi0;   // phi0_hat on the grid
  double M = 0.0;
  double alpha_tilde = 0.0;
  double A = 0.0;
  Spectrum phi;    // phi0_hat(M w) on the grid
  double combined_max = 0.0;  // max over the grid of |phi_hat|^2 + LP

  double phi_hat(double w) const { return phi0_hat(M * w); }
};

inline constexpr double kCombinedBoundTolerance = 1e-9;

/// min over (0, 1/2] of (1 - phi0_hat(w)^2) / w^2.
inline double measure_alpha_tilde(std::size_t samples = 20000) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= samples; ++i) {
    const double w = 0.5 * static_cast<double>(i) / static_cast<double>(samples);
    const double p = phi0_hat(w);
    best = std::min(best, (1 - p * p) / (w * w));
  }
  return best;
}

/// max of LP(w)/w^2 over the nonzero grid frequencies and a dense set in (0, 1].
inline double measure_A(const FilterBank& bank) {
  const auto lp = bank.lp_grid();
  double A = 0.0;
  for (std::size_t k = 1; k < lp.size(); ++k) {
    const double w = frequency_of(k, bank.size());
    A = std::max(A, lp[k] / (w * w));
  }
  for (int i = 0; i <= 30 * 16; ++i) {
    const double w = std::exp2(-static_cast<double>(i) / 16);
    A = std::max(A, bank.lp_at(w) / (w * w));
  }
  return A;
}

inline void require_vanishing_order(const MotherWavelet& mother) {
  const auto fit = estimate_vanishing_order(mother);
  if (!fit.passed)
    throw ConstantsError(ConstantsError::Kind::vanishing_order,
                         "mother wavelet vanishes too slowly at 0 (fitted order " + std::to_string(fit.slope) +
                             "); LP(w)/w^2 is unbounded");
}

/// Low-pass phi_hat(w) = phi0_hat(M w) with |phi_hat|^2 + LP <= 1.
inline InitLowpassConstruction initialize_lowpass(const FilterBank& bank) {
  if (!check_littlewood_paley(bank).passed)
    throw ConstantsError(ConstantsError::Kind::littlewood_paley, "bank violates the Littlewood-Paley inequality");
  require_vanishing_order(bank.mother());
  const double alpha = measure_alpha_tilde();
  const double A = measure_A(bank);
  const double M = std::sqrt(A / alpha) * (1 + 1e-6);
  const std::size_t n = bank.size();
  InitLowpassConstruction init{Spectrum::from_function(n, gamma_hat), Spectrum::from_function(n, phi0_hat),
                               M, alpha, A,
                               Spectrum::from_function(n, [M](double w) { return phi0_hat(M * w); })};
  const auto lp = bank.lp_grid();
  for (std::size_t k = 0; k < n; ++k) init.combined_max = std::max(init.combined_max, std::norm(init.phi[k]) + lp[k]);
  if (init.combined_max > 1 + kCombinedBoundTolerance)
    throw ConstantsError(ConstantsError::Kind::littlewood_paley,
                         "initialization low-pass exceeds the combined bound: " + std::to_string(init.combined_max));
  return init;
}

/// (|phi_hat|^2 * c)(w) with c(d) = exp(-d^2)/sqrt(pi).
inline double smoothed_phi_energy(const InitLowpassConstruction& init, double w) {
  using Quad = boost::math::quadrature::gauss<double, 30>;
  const double half = 0.5 / init.M;  // support half-width of phi_hat
  constexpr int kPieces = 8;
  double acc = 0.0;
  for (int i = 0; i < kPieces; ++i) {
    const double lo = -half + 2 * half * i / kPieces, hi = -half + 2 * half * (i + 1) / kPieces;
    acc += Quad::integrate(
        [&](double u) {
          const double p = init.phi_hat(u);
          const double d = w - u;
          return p * p * std::exp(-d * d);
        },
        lo, hi);
  }
  return acc / std::sqrt(kPi);
}

inline constexpr double kInitTolerance = 1e-9;

/// Largest x = 2^(m/8), m in [-160, 64], with
/// (1 - (|phi_hat|^2 * c)(w)) LP(w) <= 1 - chi_hat_x(w)^2 on the whole grid.
inline double initialize_x(const FilterBank& bank, const InitLowpassConstruction& init) {
  const std::size_t n = bank.size();
  const auto lp = bank.lp_grid();
  std::vector<double> F(n), w(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = frequency_of(k, n);
    F[k] = (1 - smoothed_phi_energy(init, w[k])) * lp[k];
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (int m = 64; m >= -160; --m) {
    const double x = std::exp2(m / 8.0);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      const double g = chi_hat(x, w[k]);
      margin = std::min(margin, 1 - g * g - F[k]);
    }
    if (margin >= -kInitTolerance) return x;
    worst = std::max(worst, margin);
  }
  throw ConstantsError(ConstantsError::Kind::no_x_found,
                       "no initialization width passes; smallest violation " + std::to_string(-worst));
}

struct DecayConstants {
  double c = 0.0;
  double C = 0.0;
  double delta = 0.0;
  double a = 1.0;
  double x_init = 0.0;
  double r = 0.0;
  Band validated_band;
  std::map<std::string, double> margins;
};

inline constexpr double kDegenerateOctave = 1e-12;

/// c, C from one octave, delta = c/C, the largest admissible a = 1/sqrt(1 - c^2/C),
/// x_init from the initialization low-pass and r = x_init / a^2.
inline DecayConstants compute_constants(const FilterBank& bank, const DecayOptions& opts = {}) {
  if (!check_littlewood_paley(bank).passed)
    throw ConstantsError(ConstantsError::Kind::littlewood_paley, "bank violates the Littlewood-Paley inequality");
  require_vanishing_order(bank.mother());
  const auto ob = octave_bounds(bank, opts);
  if (!(ob.c > 0.0))
    throw ConstantsError(ConstantsError::Kind::c_nonpositive,
                         "c <= 0 (c = " + std::to_string(ob.c) + " at w = " + std::to_string(ob.c_witness) +
                             "): asymmetry too weak");
  const double ratio = ob.c * ob.c / ob.C;
  if (ratio >= 1 - kDegenerateOctave)
    throw ConstantsError(ConstantsError::Kind::degenerate_octave,
                         "degenerate octave: c^2 >= C (c = " + std::to_string(ob.c) + ", C = " +
                             std::to_string(ob.C) + ")");
  DecayConstants k;
  k.c = ob.c;
  k.C = ob.C;
  k.delta = ob.c / ob.C;
  k.a = 1 / std::sqrt(1 - ratio);
  k.validated_band = validated_band(bank);

  const auto init = initialize_lowpass(bank);
  k.x_init = initialize_x(bank, init);
  k.r = k.x_init / (k.a * k.a);

  const auto f1 = compute_F1(bank);
  const auto f2 = compute_F2(bank);
  double mc = std::numeric_limits<double>::infinity(), mC = mc;
  for (int w = k.validated_band.lo; w <= k.validated_band.hi; ++w) {
    mc = std::min(mc, f1.at(w) - k.c * w);
    mC = std::min(mC, k.C * w * w - f2.at(w));
  }
  k.margins["F1_minus_c_omega"] = mc;
  k.margins["C_omega2_minus_F2"] = mC;
  k.margins["degeneracy"] = 1 - ratio;
  k.margins["combined_lowpass"] = 1 - init.combined_max;
  k.margins["M"] = init.M;
  k.margins["A"] = init.A;
  k.margins["alpha_tilde"] = init.alpha_tilde;
  return k;
}

/// Pointwise envelope inequality on w = 0 and the validated band:
/// (1/2) sum_j [|psi_j(w)|^2 (1 - chi_x(w - d_j)^2) + |psi_j(-w)|^2 (1 - chi_x(-w - d_j)^2)]
///   <= 1 - chi_{a x}(w)^2,  d_j = delta 2^-j.
inline ConditionReport lemma2_envelope_check(const FilterBank& bank, double x, double delta, double a,
                                             double tol = 1e-9) {
  if (!(x > 0.0)) throw InvalidArgument("x must be positive");
  const Band band = validated_band(bank);
  std::vector<int> freqs{0};
  for (int w = band.lo; w <= band.hi; ++w) freqs.push_back(w);
  ConditionReport r{Condition::envelope};
  r.margin = std::numeric_limits<double>::infinity();
  r.tolerance = tol;
  for (int w : freqs) {
    double lhs = 0.0;
    for (int j = bank.j_min(); j <= bank.J(); ++j) {
      const double dj = std::ldexp(delta, -j);
      const double gp = chi_hat(x, w - dj), gm = chi_hat(x, -w - dj);
      lhs += 0.5 * (std::norm(bank.response(j, w)) * (1 - gp * gp) + std::norm(bank.response(j, -w)) * (1 - gm * gm));
    }
    const double g = chi_hat(a * x, w);
    const double margin = (1 - g * g) - lhs;
    if (margin < r.margin) r.margin = margin, r.witness_freq = w;
  }
  r.passed = r.margin >= -tol;
  r.details["x"] = x;
  r.details["a"] = a;
  r.details["delta"] = delta;
  return r;
}

inline ConditionReport lemma2_envelope_check(const FilterBank& bank, double x, const DecayConstants& k,
                                             double tol = 1e-9) {
  return lemma2_envelope_check(bank, x, k.delta, k.a, tol);
}

struct Lemma1Report {
  double lhs = 0.0;  // || |f * psi_j| * chi_x ||^2
  double rhs = 0.0;  // sum |f_hat|^2 |psi_j|^2 chi_x(w - delta)^2
  double tolerance = 0.0;
  bool passed = false;
};

inline Lemma1Report lemma1_check(const Signal& f, int j, double x, double delta, const FilterBank& bank,
                                 double rel_tol = 1e-10) {
  if (!(x > 0.0)) throw InvalidArgument("x must be positive");
  const Spectrum fh = dft(f);
  const auto& psi = bank.filter(j);
  const Signal g = modulus(convolve(f, psi));
  const Spectrum gh = dft(g);
  Lemma1Report r;
  for (std::size_t k = 0; k < fh.size(); ++k) {
    const double w = frequency_of(k, fh.size());
    const double c0 = chi_hat(x, w), cd = chi_hat(x, w - delta);
    r.lhs += std::norm(gh[k]) * c0 * c0;
    r.rhs += std::norm(fh[k] * psi[k]) * cd * cd;
  }
  r.tolerance = rel_tol * energy(f);
  r.passed = r.lhs - r.rhs >= -r.tolerance;
  return r;
}

/// sum_w |f_hat(w)|^2 (1 - chi_hat_x(w)^2) = ||f||^2 - ||f * chi_x||^2.
inline double decay_bound(const Spectrum& fh, double x) {
  double acc = 0.0;
  for (std::size_t k = 0; k < fh.size(); ++k) {
    const double g = chi_hat(x, frequency_of(k, fh.size()));
    acc += std::norm(fh[k]) * (1 - g * g);
  }
  return acc;
}

struct DecayRow {
  std::size_t n = 0;
  double empirical = 0.0;
  double bound = 0.0;
  double slack = 0.0;
};

/// Compares sum_{|p|=n} ||U[p]f||^2 with the bound at x = r a^n for n = 2..n_max.
inline std::vector<DecayRow> verify_decay(const Signal& f, const FilterBank& bank, const DecayConstants& k,
                                          std::size_t n_max, const Budget& budget = {}) {
  if (n_max < 2 || n_max > 5) throw InvalidArgument("n_max must lie in [2, 5]");
  if (!f.is_real()) throw InvalidArgument("verify_decay requires a real signal");
  if (f.size() != bank.size()) throw LengthMismatch(bank.size(), f.size());
  const Spectrum fh = dft(f);
  const double e = spectral_energy(fh);
  for (std::size_t i = 1; i < fh.size(); ++i) {
    const int w = std::abs(frequency_of(i, fh.size()));
    if (!k.validated_band.contains(w) && std::norm(fh[i]) > 1e-24 * std::max(e, 1e-300) && std::norm(fh[i]) > 1e-300)
      throw InvalidArgument("signal has energy at frequency " + std::to_string(frequency_of(i, fh.size())) +
                            " outside the validated band");
  }
  const auto profile = layer_energy_profile(f, bank, n_max, budget);
  std::vector<DecayRow> rows;
  for (std::size_t n = 2; n <= n_max; ++n) {
    DecayRow row{n, profile[n], decay_bound(fh, k.r * std::pow(k.a, static_cast<double>(n)))};
    row.slack = row.bound - row.empirical;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace scatter
