#pragma once

// Dyadic wavelet filter banks sampled on the integer frequency grid, and the
// admissibility audits: Littlewood-Paley inequality, positive/negative
// frequency asymmetry, and vanishing order at zero frequency.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scatter/signal.hpp"

namespace scatter {

struct MotherWavelet {
  std::string name;
  std::map<std::string, double> params;
  std::function<cplx(double)> hat_psi;

  cplx operator()(double w) const { return hat_psi(w); }
};

enum class MorletCorrection {
  zero_mean,    // subtract exp(-xi^2/2s^2) exp(-w^2/2s^2): psi_hat(0) = 0, linear at 0
  two_moments,  // also cancel the first derivative at 0: quadratic at 0
};

/// Gaussian centered at xi0 with a correction term subtracted so that the
/// transform vanishes at zero (and, for two_moments, has zero slope there).
inline MotherWavelet morlet_mother(double xi0, double sigma,
                                   MorletCorrection correction = MorletCorrection::two_moments) {
  if (!(sigma > 0.0)) throw InvalidArgument("morlet: sigma must be positive");
  const double s2 = sigma * sigma;
  const double kappa = std::exp(-xi0 * xi0 / (2.0 * s2));
  const bool first_order_too = correction == MorletCorrection::two_moments;
  auto hat = [=](double w) -> cplx {
    const double envelope = kappa * std::exp(-w * w / (2.0 * s2));
    const double s = w * xi0 / s2;
    // Factorized form K e^{-w^2/2s^2} (e^s - 1 [- s]) is exact near 0;
    // the direct form avoids exp overflow far from it.
    if (std::abs(s) <= 1.0) return envelope * (std::expm1(s) - (first_order_too ? s : 0.0));
    const double d = w - xi0;
    return std::exp(-d * d / (2.0 * s2)) - envelope * (1.0 + (first_order_too ? s : 0.0));
  };
  return {first_order_too ? "morlet" : "morlet_zero_mean",
          {{"xi0", xi0}, {"sigma", sigma}},
          hat};
}

/// sqrt(2) on (1, 2], zero elsewhere: an analytic tight frame.
inline MotherWavelet shannon_analytic_mother() {
  return {"shannon", {}, [](double w) -> cplx { return (w > 1.0 && w <= 2.0) ? std::sqrt(2.0) : 0.0; }};
}

/// Real, even spectrum (w/xi)^2 exp(1 - (w/xi)^2): satisfies everything but asymmetry.
inline MotherWavelet even_real_mother(double xi = 2.0, double scale = 0.8) {
  if (!(xi > 0.0)) throw InvalidArgument("even_real: xi must be positive");
  return {"even_real", {{"xi", xi}, {"scale", scale}}, [=](double w) -> cplx {
            const double u = w / xi;
            return scale * u * u * std::exp(1.0 - u * u);
          }};
}

/// Analytic spectrum (w/xi) exp(1 - w/xi) on w > 0: a single vanishing moment.
inline MotherWavelet ramp_mother(double xi = 2.0, double scale = 0.8) {
  if (!(xi > 0.0)) throw InvalidArgument("ramp: xi must be positive");
  return {"ramp", {{"xi", xi}, {"scale", scale}}, [=](double w) -> cplx {
            if (w <= 0.0) return 0.0;
            const double u = w / xi;
            return scale * u * std::exp(1.0 - u);
          }};
}

/// psi_hat(w) = w. Only meaningful for the vanishing-order estimate.
inline MotherWavelet linear_mother() {
  return {"linear", {}, [](double w) -> cplx { return w; }};
}

inline MotherWavelet zero_mother() {
  return {"zero", {}, [](double) -> cplx { return 0.0; }};
}

inline MotherWavelet scaled(MotherWavelet m, double factor) {
  auto inner = m.hat_psi;
  m.hat_psi = [inner, factor](double w) { return factor * inner(w); };
  m.params["gain"] = factor * (m.params.count("gain") ? m.params["gain"] : 1.0);
  return m;
}

/// Construct a mother by name. Recognized: shannon, morlet, morlet_zero_mean,
/// even_real, ramp, linear, zero. Every mother accepts an extra "gain".
inline MotherWavelet make_mother(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const char* key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  MotherWavelet m;
  if (name == "shannon") m = shannon_analytic_mother();
  else if (name == "morlet") m = morlet_mother(get("xi0", 3.0), get("sigma", 1.0), MorletCorrection::two_moments);
  else if (name == "morlet_zero_mean") m = morlet_mother(get("xi0", 3.0), get("sigma", 1.0), MorletCorrection::zero_mean);
  else if (name == "even_real") m = even_real_mother(get("xi", 2.0), get("scale", 0.8));
  else if (name == "ramp") m = ramp_mother(get("xi", 2.0), get("scale", 0.8));
  else if (name == "linear") m = linear_mother();
  else if (name == "zero") m = zero_mother();
  else throw InvalidArgument("unknown mother wavelet '" + name + "'");
  if (auto it = params.find("gain"); it != params.end()) m = scaled(std::move(m), it->second);
  return m;
}

/// Closed interval of positive integer frequencies; empty when lo > hi.
struct Band {
  int lo = 1;
  int hi = 0;
  bool empty() const noexcept { return lo > hi; }
  bool contains(double w) const noexcept { return w >= lo && w <= hi; }
  auto operator<=>(const Band&) const = default;
};

/// Default finest scale: the bank then spans log2(N) octaves below J.
inline int default_j_min(int J, std::size_t n) {
  int octaves = 0;
  while ((std::size_t{1} << octaves) < n) ++octaves;
  return J - octaves + 1;
}

class FilterBank {
 public:
  FilterBank(MotherWavelet mother, int J, int j_min, std::size_t n)
      : mother_(std::move(mother)), J_(J), j_min_(j_min), n_(n) {
    require_grid_size(n);
    if (j_min > J) throw InvalidArgument("filter bank: j_min must not exceed J");
    if (J - j_min > 512) throw InvalidArgument("filter bank: scale range too wide");
    filters_.reserve(static_cast<std::size_t>(J - j_min + 1));
    for (int j = j_min; j <= J; ++j)
      filters_.push_back(Spectrum::from_function(n, [&](double w) { return response(j, w); }));
  }

  int J() const noexcept { return J_; }
  int j_min() const noexcept { return j_min_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t breadth() const noexcept { return filters_.size(); }
  const MotherWavelet& mother() const noexcept { return mother_; }
  bool contains_scale(int j) const noexcept { return j >= j_min_ && j <= J_; }

  const Spectrum& filter(int j) const {
    if (!contains_scale(j))
      throw InvalidArgument("scale " + std::to_string(j) + " outside [" + std::to_string(j_min_) + ", " +
                            std::to_string(J_) + "]");
    return filters_[static_cast<std::size_t>(j - j_min_)];
  }

  std::vector<int> scales() const {
    std::vector<int> out;
    for (int j = j_min_; j <= J_; ++j) out.push_back(j);
    return out;
  }

  /// psi_hat(2^j w) for any real w; equals filter(j) exactly on grid points.
  cplx response(int j, double w) const { return mother_(std::ldexp(w, j)); }

  /// (1/2) sum_j (|psi_j(w)|^2 + |psi_j(-w)|^2) per storage index, with -w
  /// taken on the circle (the Nyquist bin is its own mirror).
  std::vector<double> lp_grid() const {
    std::vector<double> lp(n_, 0.0);
    for (const auto& f : filters_)
      for (std::size_t k = 0; k < n_; ++k) lp[k] += 0.5 * (std::norm(f[k]) + std::norm(f[mirror_index(k, n_)]));
    return lp;
  }

  /// Littlewood-Paley sum at an arbitrary real frequency over [j_min, J].
  double lp_at(double w) const { return lp_at(w, j_min_, J_); }

  double lp_at(double w, int lo, int hi) const {
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += 0.5 * (std::norm(mother_(std::ldexp(w, j))) + std::norm(mother_(std::ldexp(-w, j))));
    return acc;
  }

 private:
  MotherWavelet mother_;
  int J_;
  int j_min_;
  std::size_t n_;
  std::vector<Spectrum> filters_;
};

inline FilterBank build_bank(MotherWavelet mother, int J, int j_min, std::size_t n) {
  return FilterBank(std::move(mother), J, j_min, n);
}

inline FilterBank build_bank(MotherWavelet mother, int J, std::size_t n) {
  return FilterBank(std::move(mother), J, default_j_min(J, n), n);
}

/// Frequency moments of the bank at w, summed over scales [lo, hi]:
/// s = (1/2) sum (|p|^2 + |q|^2), m1 = (1/2) sum (|p|^2 - |q|^2) 2^-j,
/// m2 = (1/2) sum (|p|^2 + |q|^2) 2^-2j, m1abs = (1/2) sum (|p|^2 + |q|^2) 2^-j,
/// with p = psi_j(w), q = psi_j(-w).
struct ScaleMoments {
  double s = 0.0;
  double m1 = 0.0;
  double m1abs = 0.0;
  double m2 = 0.0;
};

inline ScaleMoments scale_moments(const MotherWavelet& mother, double w, int lo, int hi) {
  ScaleMoments m;
  for (int j = lo; j <= hi; ++j) {
    const double p = std::norm(mother(std::ldexp(w, j)));
    const double q = std::norm(mother(std::ldexp(-w, j)));
    const double wj = std::ldexp(1.0, -j);
    m.s += 0.5 * (p + q);
    m.m1 += 0.5 * (p - q) * wj;
    m.m1abs += 0.5 * (p + q) * wj;
    m.m2 += 0.5 * (p + q) * wj * wj;
  }
  return m;
}

inline ScaleMoments scale_moments(const FilterBank& bank, double w) {
  return scale_moments(bank.mother(), w, bank.j_min(), bank.J());
}

/// Scales added on each side when estimating the untruncated dyadic family.
inline constexpr int kBandExtension = 64;

/// Positive grid frequencies where the bank's truncated scale range
/// reproduces the untruncated S, F1, F2 sums to relative tolerance `tol`.
/// Returns the longest contiguous such run (lowest on ties).
inline Band validated_band(const FilterBank& bank, double tol = 1e-12) {
  const int nyq = static_cast<int>(bank.size() / 2);
  Band best, run;
  bool in_run = false;
  for (int w = 1; w < nyq; ++w) {
    const auto t = scale_moments(bank, w);
    const auto e = scale_moments(bank.mother(), w, bank.j_min() - kBandExtension, bank.J() + kBandExtension);
    const bool ok = e.s > 0.0 && t.s > 1e-12 && std::abs(t.s - e.s) <= tol * e.s &&
                    std::abs(t.m1 - e.m1) <= tol * e.m1abs && std::abs(t.m2 - e.m2) <= tol * e.m2;
    if (ok) {
      if (!in_run) run = Band{w, w};
      run.hi = w;
      in_run = true;
      if (best.empty() || (run.hi - run.lo) > (best.hi - best.lo)) best = run;
    } else {
      in_run = false;
    }
  }
  return best;
}

enum class Condition { littlewood_paley, asymmetry, vanishing_order, envelope };

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::littlewood_paley: return "littlewood_paley";
    case Condition::asymmetry: return "asymmetry";
    case Condition::vanishing_order: return "vanishing_order";
    case Condition::envelope: return "envelope";
  }
  return "unknown";
}

struct ConditionReport {
  Condition condition;
  bool passed = false;
  double margin = 0.0;        // positive = satisfied
  double witness_freq = 0.0;  // frequency of the worst margin
  double tolerance = 0.0;
  std::map<std::string, double> details;
};

struct VanishingOrderReport {
  double epsilon_hat = 0.0;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  double slope = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
  bool identically_zero_near_0 = false;
  bool passed = false;
};

inline constexpr double kLittlewoodPaleyTolerance = 1e-9;
inline constexpr double kAsymmetryTolerance = 1e-12;
inline constexpr double kVanishingOrderThreshold = 0.05;

/// (1/2) sum_j (|psi_j(w)|^2 + |psi_j(-w)|^2) <= 1 on every grid frequency.
inline ConditionReport check_littlewood_paley(const FilterBank& bank, double tol = kLittlewoodPaleyTolerance) {
  const auto lp = bank.lp_grid();
  const auto worst = std::max_element(lp.begin(), lp.end());
  const auto k = static_cast<std::size_t>(worst - lp.begin());
  ConditionReport r{Condition::littlewood_paley};
  r.margin = 1.0 - *worst;
  r.passed = r.margin >= -tol;
  r.witness_freq = frequency_of(k, bank.size());
  r.tolerance = tol;
  r.details["max_sum"] = *worst;

  const Band band = validated_band(bank);
  r.details["band_lo"] = band.lo;
  r.details["band_hi"] = band.hi;
  // Mass the infinite family would add beyond [j_min, J], worst positive frequency.
  double neglected = 0.0;
  const int nyq = static_cast<int>(bank.size() / 2);
  for (int w = 1; w < nyq; ++w) {
    const double full = bank.lp_at(w, bank.j_min() - kBandExtension, bank.J() + kBandExtension);
    neglected = std::max(neglected, full - lp[static_cast<std::size_t>(w)]);
  }
  r.details["neglected_lp_mass"] = neglected;
  return r;
}

/// |psi_j(-w)| <= |psi_j(w)| for all j and w > 0, strictly for some j at every w.
inline ConditionReport check_asymmetry(const FilterBank& bank, double tol = kAsymmetryTolerance) {
  const std::size_t n = bank.size();
  const int nyq = static_cast<int>(n / 2);
  double margin = std::numeric_limits<double>::infinity();
  double witness = 1.0;
  double violation = -std::numeric_limits<double>::infinity();
  double violation_freq = 1.0;
  for (int w = 1; w < nyq; ++w) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = bank.j_min(); j <= bank.J(); ++j) {
      const auto& f = bank.filter(j);
      const double d = std::abs(f.at(w)) - std::abs(f.at(-w));
      best = std::max(best, d);
      if (-d > violation) {
        violation = -d;
        violation_freq = w;
      }
    }
    if (best < margin) {
      margin = best;
      witness = w;
    }
  }
  ConditionReport r{Condition::asymmetry};
  r.margin = margin;
  r.witness_freq = witness;
  r.tolerance = tol;
  r.passed = violation <= tol && margin > tol;
  r.details["max_violation"] = violation;
  r.details["violation_freq"] = violation_freq;
  return r;
}

/// Least-squares slope of log|psi_hat| against log w on [2^-10, 2^-4];
/// epsilon_hat = slope - 1. The larger of |psi(w)|, |psi(-w)| is used.
inline VanishingOrderReport estimate_vanishing_order(const MotherWavelet& mother,
                                                     double threshold = kVanishingOrderThreshold) {
  constexpr int kPerOctave = 10;
  constexpr int kLoExp = -10, kHiExp = -4;
  VanishingOrderReport r;
  r.fit_lo = std::ldexp(1.0, kLoExp);
  r.fit_hi = std::ldexp(1.0, kHiExp);
  std::vector<double> xs, ys;
  for (int i = 0; i <= (kHiExp - kLoExp) * kPerOctave; ++i) {
    const double w = std::exp2(kLoExp + static_cast<double>(i) / kPerOctave);
    const double v = std::max(std::abs(mother(w)), std::abs(mother(-w)));
    if (v > 0.0 && std::isfinite(v)) {
      xs.push_back(std::log(w));
      ys.push_back(std::log(v));
    }
  }
  r.points = xs.size();
  if (xs.size() < 6) {
    r.identically_zero_near_0 = true;
    r.epsilon_hat = std::numeric_limits<double>::infinity();
    r.slope = std::numeric_limits<double>::infinity();
    r.passed = true;
    return r;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  r.slope = sxy / sxx;
  const double intercept = my - r.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + r.slope * xs[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  r.epsilon_hat = r.slope - 1.0;
  r.passed = r.epsilon_hat >= threshold;
  return r;
}

inline ConditionReport to_condition_report(const VanishingOrderReport& v,
                                           double threshold = kVanishingOrderThreshold) {
  ConditionReport r{Condition::vanishing_order};
  r.passed = v.passed;
  r.margin = v.identically_zero_near_0 ? std::numeric_limits<double>::infinity() : v.epsilon_hat - threshold;
  r.witness_freq = v.fit_lo;
  r.tolerance = 0.0;
  r.details["epsilon_hat"] = v.epsilon_hat;
  r.details["slope"] = v.slope;
  r.details["residual"] = v.residual;
  r.details["identically_zero_near_0"] = v.identically_zero_near_0 ? 1.0 : 0.0;
  return r;
}

struct BankAudit {
  ConditionReport littlewood_paley;
  ConditionReport asymmetry;
  ConditionReport vanishing_order;
  VanishingOrderReport vanishing_fit;
  bool passed() const { return littlewood_paley.passed && asymmetry.passed && vanishing_order.passed; }
};

inline BankAudit audit_bank(const FilterBank& bank) {
  auto fit = estimate_vanishing_order(bank.mother());
  return {check_littlewood_paley(bank), check_asymmetry(bank), to_condition_report(fit), fit};
}

}  // namespace scatter
