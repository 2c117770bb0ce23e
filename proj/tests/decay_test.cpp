#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "scatter/decay.hpp"

using namespace scatter;

namespace {

FilterBank shannon_bank(std::size_t n = 256, int j_min = -6) {
  return build_bank(shannon_analytic_mother(), 1, j_min, n);
}
FilterBank morlet_bank() { return build_bank(morlet_mother(3, 1), 3, -24, 256); }

const DecayConstants& shannon_constants() {
  static const DecayConstants k = compute_constants(shannon_bank());
  return k;
}
const DecayConstants& morlet_constants() {
  static const DecayConstants k = compute_constants(morlet_bank());
  return k;
}

ConstantsError::Kind constants_error_kind(const FilterBank& b, DecayOptions opts = {}) {
  try {
    compute_constants(b, opts);
  } catch (const ConstantsError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no constants error";
  return ConstantsError::Kind::no_x_found;
}

}  // namespace

TEST(Functionals, ShannonClosedForms) {
  const auto b = shannon_bank();
  const auto S = compute_S(b), F1 = compute_F1(b), F2 = compute_F2(b);
  EXPECT_EQ(S.band, (Band{1, 127}));
  for (int w = 1; w <= 127; ++w) {
    // single active scale j = -k for w in (2^k, 2^{k+1}]
    const int k = static_cast<int>(std::ceil(std::log2(static_cast<double>(w)))) - 1;
    EXPECT_NEAR(S.at(w), 1.0, 1e-15);
    EXPECT_NEAR(F1.at(w), std::ldexp(1.0, k), 1e-12) << w;
    EXPECT_NEAR(F2.at(w), std::ldexp(1.0, 2 * k), 1e-12) << w;
  }
  EXPECT_THROW(S.at(0), InvalidArgument);
}

TEST(Functionals, ScaledShannonHalvesS) {
  const auto b = build_bank(scaled(shannon_analytic_mother(), 1 / std::sqrt(2.0)), 1, -6, 256);
  const auto S = compute_S(b), F1 = compute_F1(b);
  for (int w = 1; w <= 127; ++w) EXPECT_NEAR(S.at(w), 0.5, 1e-15);
  EXPECT_NEAR(F1.at(100), 64.0, 1e-12);
}

TEST(Functionals, MorletMatchesDirectSummation) {
  const auto b = morlet_bank();
  const auto S = compute_S(b), F1 = compute_F1(b), F2 = compute_F2(b);
  for (int w = 1; w <= 127; w += 9) {
    double s = 0, m1 = 0, m2 = 0;
    for (int j = b.j_min(); j <= b.J(); ++j) {
      const double p = std::norm(b.filter(j).at(w)), q = std::norm(b.filter(j).at(-w));
      s += (p + q) / 2;
      m1 += (p - q) / 2 * std::pow(2.0, -j);
      m2 += (p + q) / 2 * std::pow(4.0, -j);
    }
    EXPECT_GT(S.at(w), 0.0);
    EXPECT_LE(S.at(w), 1.0);
    EXPECT_TRUE(oracle::close_rel(S.at(w), s, 1e-12));
    EXPECT_TRUE(oracle::close_rel(F1.at(w), m1 / s, 1e-12));
    EXPECT_TRUE(oracle::close_rel(F2.at(w), m2 / s, 1e-12));
  }
}

TEST(Functionals, DyadicHomogeneity) {
  for (const auto& b : {shannon_bank(), morlet_bank()}) {
    const auto F1 = compute_F1(b), F2 = compute_F2(b);
    for (int w = F1.band.lo; 2 * w <= F1.band.hi; ++w) {
      EXPECT_TRUE(oracle::close_rel(F1.at(2 * w), 2 * F1.at(w), 1e-10)) << w;
      EXPECT_TRUE(oracle::close_rel(F2.at(2 * w), 4 * F2.at(w), 1e-10)) << w;
    }
  }
}

TEST(Functionals, EmptyBandIsAnError) {
  try {
    compute_S(build_bank(morlet_mother(3, 1), 3, 256));
    FAIL();
  } catch (const ConstantsError& e) {
    EXPECT_EQ(e.kind(), ConstantsError::Kind::empty_band);
  }
}

TEST(Constants, ShannonClosedForm) {
  const auto& k = shannon_constants();
  EXPECT_NEAR(k.c, 0.5, 1e-9);
  EXPECT_NEAR(k.C, 1.0, 1e-9);
  EXPECT_NEAR(k.delta, 0.5, 1e-9);
  EXPECT_NEAR(k.a, 2 / std::sqrt(3.0), 1e-9);
  EXPECT_GT(k.x_init, 0.0);
  EXPECT_DOUBLE_EQ(k.r, k.x_init / (k.a * k.a));
  EXPECT_EQ(k.validated_band, (Band{1, 127}));
}

TEST(Constants, ScaledShannonSameRatios) {
  const auto k = compute_constants(build_bank(scaled(shannon_analytic_mother(), 1 / std::sqrt(2.0)), 1, -6, 256));
  EXPECT_NEAR(k.c, 0.5, 1e-9);
  EXPECT_NEAR(k.C, 1.0, 1e-9);
}

TEST(Constants, BoundsHoldOnTheBand) {
  for (const auto* bk : {&shannon_constants(), &morlet_constants()}) {
    const auto& k = *bk;
    EXPECT_GT(k.a, 1.0);
    EXPECT_LE(k.c * k.c, k.C);
    EXPECT_GE(k.margins.at("F1_minus_c_omega"), -1e-10);
    EXPECT_GE(k.margins.at("C_omega2_minus_F2"), -1e-10);
  }
  const auto b = morlet_bank();
  const auto& k = morlet_constants();
  const auto F1 = compute_F1(b), F2 = compute_F2(b);
  for (int w = 1; w <= 127; ++w) {
    EXPECT_GE(F1.at(w) - k.c * w, -1e-10 * w);
    EXPECT_LE(F2.at(w) - k.C * w * w, 1e-10 * w * w);
  }
}

TEST(Constants, OctaveSamplingConvergesFromBelow) {
  DecayOptions coarse;
  coarse.octave_samples = 16;
  const auto ob = octave_bounds(morlet_bank(), coarse);
  const auto& k = morlet_constants();
  EXPECT_GE(ob.c, k.c - 1e-15);
  EXPECT_LE(ob.C, k.C + 1e-15);
  EXPECT_THROW(octave_bounds(morlet_bank(), DecayOptions{0, 1e-12}), InvalidArgument);
}

TEST(Constants, FailureKinds) {
  EXPECT_EQ(constants_error_kind(build_bank(even_real_mother(), 1, -24, 256)), ConstantsError::Kind::c_nonpositive);
  EXPECT_EQ(constants_error_kind(build_bank(ramp_mother(), 1, -6, 256)), ConstantsError::Kind::vanishing_order);
  EXPECT_EQ(constants_error_kind(build_bank(scaled(shannon_analytic_mother(), 1.1), 1, -6, 256)),
            ConstantsError::Kind::littlewood_paley);
  DecayOptions single;
  single.octave_samples = 1;
  EXPECT_EQ(constants_error_kind(shannon_bank(), single), ConstantsError::Kind::degenerate_octave);
}

TEST(EnvelopeCheck, ShannonAtFour) {
  const auto r = lemma2_envelope_check(shannon_bank(), 4.0, shannon_constants());
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.condition, Condition::envelope);
}

TEST(EnvelopeCheck, EnvelopeChainBothBanks) {
  for (int which = 0; which < 2; ++which) {
    const auto b = which ? morlet_bank() : shannon_bank();
    const auto& k = which ? morlet_constants() : shannon_constants();
    for (int n = 2; n <= 5; ++n) {
      const auto r = lemma2_envelope_check(b, k.r * std::pow(k.a, n), k);
      EXPECT_TRUE(r.passed) << "bank " << which << " n=" << n << " margin " << r.margin;
    }
  }
}

TEST(EnvelopeCheck, ZeroFrequencyContributesExactlyZero) {
  // Both sides vanish at w = 0, so the margin never exceeds 0; for Morlet every
  // positive frequency is strictly inside the envelope and w = 0 is the witness.
  const auto& k = morlet_constants();
  const auto r = lemma2_envelope_check(morlet_bank(), k.r * k.a * k.a, k);
  EXPECT_EQ(r.margin, 0.0);
  EXPECT_EQ(r.witness_freq, 0.0);
  EXPECT_LE(lemma2_envelope_check(shannon_bank(), 1.0, shannon_constants()).margin, 0.0);
}

TEST(EnvelopeCheck, OverlyFastRateFails) {
  for (int which = 0; which < 2; ++which) {
    const auto b = which ? morlet_bank() : shannon_bank();
    const auto& k = which ? morlet_constants() : shannon_constants();
    bool failed = false;
    for (int m = -8; m <= 32 && !failed; ++m) {
      const auto r = lemma2_envelope_check(b, std::exp2(m / 4.0), k.delta, 2 * k.a * k.a);
      if (!r.passed) {
        failed = true;
        EXPECT_GT(r.witness_freq, 0.0);
      }
    }
    EXPECT_TRUE(failed) << "bank " << which;
  }
}

TEST(EnvelopeCheck, SquaredRateIsSharpForShannon) {
  const auto b = shannon_bank();
  const auto& k = shannon_constants();
  for (double x : {0.5, 2.0, 8.0, 32.0}) {
    EXPECT_TRUE(lemma2_envelope_check(b, x, k.delta, k.a * k.a).passed);
    EXPECT_FALSE(lemma2_envelope_check(b, x, k.delta, k.a * k.a * 1.01).passed) << x;
  }
}

TEST(ModulusShiftCheck, NonnegativeFilteredSignalGivesEquality) {
  MotherWavelet gauss{"gauss", {}, [](double w) -> cplx { return std::exp(-w * w / 50); }};
  const auto b = build_bank(gauss, 0, 0, 128);
  const auto f = Signal::sample(128, [](double t) { return std::exp(-std::pow((t - 0.5) / 0.05, 2)); });
  const auto r = lemma1_check(f, 0, 3.0, 0.0, b);
  EXPECT_NEAR(r.lhs, r.rhs, 1e-12 * r.rhs);
  EXPECT_TRUE(r.passed);
}

TEST(ModulusShiftCheck, RandomComplexShannon) {
  const auto b = shannon_bank();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 50; ++t) {
    const Signal f(oracle::random_complex(256, 100 + t));
    const double delta = -8 + 16 * u(rng), x = std::exp2(-1 + 5 * u(rng));
    const auto r = lemma1_check(f, -2, x, delta, b);
    EXPECT_TRUE(r.passed) << r.lhs - r.rhs;
  }
}

TEST(ModulusShiftCheck, ZeroSignal) {
  const auto r = lemma1_check(Signal::zeros(256), -2, 1.0, 3.0, shannon_bank());
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(ModulusShiftCheck, RhsIsTheModulatedFilterEnergy) {
  // RHS = || f * psi_j * (chi_x e^{2 pi i delta t}) ||^2 with the modulated kernel's
  // coefficients chi_hat_x(w - delta), checked through a direct convolution.
  const auto b = shannon_bank(64);
  const Signal f(oracle::random_complex(64, 3));
  const double x = 2.0, delta = 1.5;
  std::vector<oracle::cplx> h(64);
  for (std::size_t k = 0; k < 64; ++k) h[k] = b.filter(-1)[k] * chi_hat(x, frequency_of(k, 64) - delta);
  const double ref = oracle::mean_square(oracle::direct_circular_convolution(f.samples(), h));
  EXPECT_NEAR(lemma1_check(f, -1, x, delta, b).rhs, ref, 1e-12 * ref);
}

TEST(InitLowpass, SeedNormalization) {
  EXPECT_NEAR(oracle::simpson([](double v) { return gamma_hat(v) * gamma_hat(v); }, -0.25, 0.25), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(phi0_hat(0.0), 1.0);
  EXPECT_EQ(phi0_hat(0.5), 0.0);
  EXPECT_EQ(phi0_hat(-0.7), 0.0);
}

TEST(InitLowpass, Phi0IsTheAutocorrelationOfGamma) {
  for (double w : {0.03, 0.1, 0.2, 0.27, 0.4, 0.49}) {
    const double ref = oracle::simpson([w](double v) { return gamma_hat(v) * gamma_hat(w - v); }, w - 0.25, 0.25);
    EXPECT_NEAR(phi0_hat(w), ref, 1e-12) << w;
    EXPECT_EQ(phi0_hat(-w), phi0_hat(w));
  }
}

TEST(InitLowpass, AlphaTildeIsALowerBound) {
  const double alpha = measure_alpha_tilde();
  for (int i = 1; i <= 997; ++i) {
    const double w = 0.5 * i / 997.0;
    EXPECT_LE(alpha, (1 - phi0_hat(w) * phi0_hat(w)) / (w * w) + 1e-9);
  }
}

TEST(InitLowpass, CombinedBoundAndScaling) {
  for (const auto& b : {shannon_bank(), morlet_bank()}) {
    const auto init = initialize_lowpass(b);
    EXPECT_DOUBLE_EQ(init.phi.at(0).real(), 1.0);
    EXPECT_DOUBLE_EQ(init.phi_hat(0.0), 1.0);
    EXPECT_GE(init.M, std::sqrt(init.A / init.alpha_tilde));
    const auto lp = b.lp_grid();
    for (std::size_t k = 0; k < lp.size(); ++k) EXPECT_LE(std::norm(init.phi[k]) + lp[k], 1 + 1e-9);
    // A bounds LP / w^2 on the grid
    for (std::size_t k = 1; k < lp.size(); ++k) {
      const double w = frequency_of(k, lp.size());
      EXPECT_LE(lp[k], init.A * w * w * (1 + 1e-12));
    }
  }
}

TEST(InitLowpass, RejectsSingleVanishingMoment) {
  try {
    initialize_lowpass(build_bank(ramp_mother(), 1, -6, 256));
    FAIL();
  } catch (const ConstantsError& e) {
    EXPECT_EQ(e.kind(), ConstantsError::Kind::vanishing_order);
  }
}

TEST(InitX, LargestPassingGridValue) {
  const auto b = shannon_bank();
  const auto init = initialize_lowpass(b);
  const double x = initialize_x(b, init);
  const auto lp = b.lp_grid();
  auto margin = [&](double xx) {
    double m = 1e300;
    for (std::size_t k = 0; k < lp.size(); ++k) {
      const double w = frequency_of(k, lp.size());
      // independent quadrature of (|phi|^2 * c)(w) by Simpson over phi's support
      const double half = 0.5 / init.M;
      const double conv = oracle::simpson(
          [&](double u) { return std::pow(init.phi_hat(u), 2) * std::exp(-(w - u) * (w - u)) / std::sqrt(kPi); },
          -half, half, 2000);
      const double g = chi_hat(xx, w);
      m = std::min(m, 1 - g * g - (1 - conv) * lp[k]);
    }
    return m;
  };
  EXPECT_GE(margin(x), -1e-9);
  EXPECT_LT(margin(x * std::exp2(1.0 / 8)), -1e-9);
  EXPECT_NEAR(std::log2(x) * 8, std::round(std::log2(x) * 8), 1e-9);
}

TEST(InitX, StableUnderGridRefinement) {
  const auto k256 = compute_constants(shannon_bank(256, -6));
  const auto k512 = compute_constants(shannon_bank(512, -7));
  EXPECT_LE(std::abs(std::log2(k512.x_init / k256.x_init)), 1.0 / 8 + 1e-12);
}

TEST(InitX, SmoothedEnergyNearOneForSmallShift) {
  const auto init = initialize_lowpass(shannon_bank());
  // |phi|^2 * c at 0 is below 1 and positive
  const double v = smoothed_phi_energy(init, 0.0);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_NEAR(smoothed_phi_energy(init, 0.3), smoothed_phi_energy(init, -0.3), 1e-14);
}

TEST(VerifyDecay, ZeroSignal) {
  const auto rows = verify_decay(Signal::zeros(256), shannon_bank(), shannon_constants(), 4);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.empirical, 0.0);
    EXPECT_EQ(r.bound, 0.0);
    EXPECT_EQ(r.slack, 0.0);
  }
}

TEST(VerifyDecay, PureToneBound) {
  const auto& k = shannon_constants();
  const int w0 = 20;
  const auto f = Signal::sample(256, [](double t) { return std::cos(2 * kPi * w0 * t); });
  const auto rows = verify_decay(f, shannon_bank(), k, 3);
  for (const auto& r : rows) {
    const double x = k.r * std::pow(k.a, static_cast<double>(r.n));
    EXPECT_NEAR(r.bound, energy(f) * (1 - std::exp(-2 * std::pow(w0 / x, 2))), 1e-14);
  }
}

TEST(VerifyDecay, RandomSignalsRespectTheBound) {
  const auto b = shannon_bank();
  const auto& k = shannon_constants();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = random_bandlimited_real(256, 1, 127, seed);
    const auto rows = verify_decay(f, b, k, 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_GE(rows[i].slack, -1e-8);
      if (i) {
        EXPECT_LE(rows[i].empirical, rows[i - 1].empirical);
        EXPECT_LE(rows[i].bound, rows[i - 1].bound);
      }
    }
  }
}

TEST(VerifyDecay, Preconditions) {
  const auto b = shannon_bank();
  const auto& k = shannon_constants();
  const auto f = random_bandlimited_real(256, 1, 127, 1);
  EXPECT_THROW(verify_decay(f, b, k, 1), InvalidArgument);
  EXPECT_THROW(verify_decay(f, b, k, 6), InvalidArgument);
  EXPECT_THROW(verify_decay(Signal(oracle::random_complex(256, 1)), b, k, 2), InvalidArgument);
  const auto nyquist = Signal::sample(256, [](double t) { return std::cos(2 * kPi * 128 * t); });
  EXPECT_THROW(verify_decay(nyquist, b, k, 2), InvalidArgument);
}

TEST(DecayBound, MatchesFilteredEnergyDifference) {
  const auto f = random_bandlimited_real(128, 1, 63, 5, true);
  const double x = 7.0;
  const double ref = energy(f) - energy(convolve(f, gaussian_lowpass(x, 128)));
  EXPECT_NEAR(decay_bound(dft(f), x), ref, 1e-12 * energy(f));
}
