#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <gtest/gtest.h>

#include "boxguide/errors.hpp"
#include "boxguide/waves.hpp"

using namespace boxguide;

namespace {

constexpr cplx kI{0.0, 1.0};

// Cross-section integral evaluated by Gauss-Legendre quadrature of the
// closed-form eval_wave values; shares no code with the modal formulas.
cplx quadrature_form(const WaveSpec& w, const WaveSpec& v, double R) {
  auto integrand = [&](double x2, bool imag) {
    const WaveValue a = eval_wave(w, R, x2);
    const WaveValue b = eval_wave(v, R, x2);
    const cplx f = std::conj(b.value) * a.gradient[0] - a.value * std::conj(b.gradient[0]);
    return imag ? f.imag() : f.real();
  };
  using Q = boost::math::quadrature::gauss<double, 30>;
  const double re = Q::integrate([&](double t) { return integrand(t, false); }, 0.0, 1.0);
  const double im = Q::integrate([&](double t) { return integrand(t, true); }, 0.0, 1.0);
  return {re, im};
}

std::vector<double> random_lambdas(double hi, int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(0.02 * hi, 0.995 * hi);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(d(gen));
  return out;
}

cplx expected_entry(int p, Sign sp, int q, Sign sq) {
  if (p != q || sp != sq) return 0.0;
  return sp == Sign::Plus ? kI : -kI;
}

void check_table(WaveBasis basis, Variant v, double lambda) {
  const int s = channel_count(v);
  for (int p = 0; p < s; ++p) {
    for (int q = 0; q < s; ++q) {
      for (Sign sp : {Sign::Plus, Sign::Minus}) {
        for (Sign sq : {Sign::Plus, Sign::Minus}) {
          const cplx got = symplectic_form(channel_wave(basis, p, sp, lambda, v),
                                           channel_wave(basis, q, sq, lambda, v));
          EXPECT_LT(std::abs(got - expected_entry(p, sp, q, sq)), 1e-12)
              << to_string(basis) << " " << to_string(v) << " λ=" << lambda << " p=" << p
              << " q=" << q;
        }
      }
    }
  }
}

double sup_difference(const WaveSpec& a, const WaveSpec& b) {
  double sup = 0.0;
  for (int i = 0; i <= 60; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double x1 = 3.0 * i / 60.0;
      const double x2 = j / 10.0;
      sup = std::max(sup, std::abs(eval_wave(a, x1, x2).value - eval_wave(b, x1, x2).value));
    }
  }
  return sup;
}

}  // namespace

TEST(Wavenumbers, NeumannAtThreshold) {
  const auto ks = wavenumbers(kPi2, Variant::NeumannEven, 1.0, 3);
  ASSERT_EQ(ks.size(), 3u);
  EXPECT_EQ(ks[0].regime, Regime::Propagating);
  EXPECT_NEAR(ks[0].k, kPi, 1e-14);
  EXPECT_EQ(ks[1].regime, Regime::Threshold);
  EXPECT_EQ(ks[1].k, 0.0);
  EXPECT_EQ(ks[2].regime, Regime::Evanescent);
}

TEST(Wavenumbers, EvanescentBelowThreshold) {
  const double eps = 0.1;
  const double lambda = kPi2 - eps * eps * 4.0 * kPi2 * kPi2;
  const auto ks = wavenumbers(lambda, Variant::NeumannEven, 1.0, 2);
  EXPECT_EQ(ks[1].regime, Regime::Evanescent);
  EXPECT_NEAR(ks[1].k, 0.1 * 2.0 * kPi2, 1e-12);
  EXPECT_NEAR(ks[1].k, 1.97392, 1e-5);
}

TEST(Wavenumbers, TransverseSpectraPerVariant) {
  const double h = 1.1;
  const auto n = wavenumbers(1.0, Variant::NeumannEven, h, 4);
  const auto m = wavenumbers(1.0, Variant::MixedTopDirichlet, h, 4);
  const auto d = wavenumbers(1.0, Variant::DirichletEven, h, 4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(n[i].mode.eigenvalue, std::pow(i * kPi / h, 2), 1e-12);
    EXPECT_NEAR(m[i].mode.eigenvalue, std::pow((i + 0.5) * kPi / h, 2), 1e-12);
    EXPECT_NEAR(d[i].mode.eigenvalue, std::pow((i + 1) * kPi / h, 2), 1e-12);
    if (i > 0) EXPECT_GT(n[i].mode.eigenvalue, n[i - 1].mode.eigenvalue);
  }
  EXPECT_EQ(d[0].mode.index, 1);
}

TEST(Wavenumbers, ProfilesAreOrthogonal) {
  using Q = boost::math::quadrature::gauss<double, 30>;
  for (Variant v : {Variant::NeumannEven, Variant::MixedTopDirichlet, Variant::DirichletOdd}) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const auto ma = transverse_mode(v, a, 1.2, -0.2);
        const auto mb = transverse_mode(v, b, 1.2, -0.2);
        const double ip =
            Q::integrate([&](double y) { return ma.value(y) * mb.value(y); }, -0.2, 1.0);
        EXPECT_NEAR(ip, a == b ? ma.norm_squared() : 0.0, 1e-12);
      }
    }
  }
}

TEST(Variants, Thresholds) {
  EXPECT_EQ(continuum_edge(Variant::NeumannEven), 0.0);
  EXPECT_NEAR(continuum_edge(Variant::MixedTopDirichlet), kPi2 / 4.0, 1e-15);
  EXPECT_NEAR(continuum_edge(Variant::DirichletEven), kPi2, 1e-15);
  EXPECT_EQ(channel_count(Variant::NeumannOdd), 2);
  EXPECT_EQ(channel_count(Variant::MixedTopDirichlet), 1);
  EXPECT_EQ(AsymptoticConstants::B, 1.0);
  for (Variant v : {Variant::NeumannEven, Variant::NeumannOdd, Variant::MixedTopDirichlet,
                    Variant::DirichletEven, Variant::DirichletOdd}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_FALSE(parse_variant("robin").has_value());
}

TEST(EvalWave, OscillatoryAtOrigin) {
  const WaveSpec w{WaveFamily::Oscillatory, Sign::Plus, kPi2 / 4.0, Variant::NeumannEven};
  const auto val = eval_wave(w, 0.0, 0.4).value;
  EXPECT_NEAR(val.real(), 1.0 / std::sqrt(kPi), 1e-15);
  EXPECT_NEAR(val.real(), 0.56419, 1e-5);
  EXPECT_NEAR(val.imag(), 0.0, 1e-15);
}

TEST(EvalWave, ThresholdLinearAtOrigin) {
  const WaveSpec w{WaveFamily::ThresholdLinear, Sign::Minus, kPi2, Variant::NeumannEven};
  const auto val = eval_wave(w, 0.0, 0.0).value;
  EXPECT_NEAR(std::abs(val - kI), 0.0, 1e-15);
}

TEST(EvalWave, ComboAtOrigin) {
  for (double lambda : {0.5, 4.0, 9.0}) {
    const WaveSpec w{WaveFamily::ExponentialCombo, Sign::Plus, lambda, Variant::NeumannEven};
    const double k1 = std::sqrt(kPi2 - lambda);
    const cplx want = (1.0 - kI) / std::sqrt(2.0 * k1);
    EXPECT_LT(std::abs(eval_wave(w, 0.0, 0.0).value - want), 1e-14);
  }
}

TEST(EvalWave, FamilyMismatchIsDomainError) {
  EXPECT_THROW(eval_wave({WaveFamily::ThresholdLinear, Sign::Plus, 9.0, Variant::NeumannEven}, 0, 0),
               DomainError);
  EXPECT_THROW(
      eval_wave({WaveFamily::ThresholdOscillatory, Sign::Plus, 9.0, Variant::NeumannEven}, 0, 0),
      DomainError);
  EXPECT_THROW(
      eval_wave({WaveFamily::ExponentialCombo, Sign::Plus, 10.0, Variant::NeumannEven}, 0, 0),
      DomainError);
  EXPECT_THROW(eval_wave({WaveFamily::Oscillatory, Sign::Plus, 1.0, Variant::NeumannEven}, 0, 1.5),
               DomainError);
}

TEST(EvalWave, GradientMatchesCentralDifferences) {
  const double h = 1e-5;
  const double lambda = 6.3;
  std::vector<WaveSpec> specs;
  for (auto fam : {WaveFamily::Oscillatory, WaveFamily::ExponentialRaw,
                   WaveFamily::ExponentialCombo, WaveFamily::Stabilized}) {
    for (Sign s : {Sign::Plus, Sign::Minus}) specs.push_back({fam, s, lambda, Variant::NeumannEven});
  }
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    specs.push_back({WaveFamily::ThresholdOscillatory, s, kPi2, Variant::NeumannEven});
    specs.push_back({WaveFamily::ThresholdLinear, s, kPi2, Variant::NeumannEven});
    specs.push_back({WaveFamily::ExponentialCombo, s, 1.5, Variant::MixedTopDirichlet});
    specs.push_back({WaveFamily::Stabilized, s, 8.0, Variant::DirichletEven});
  }
  for (const auto& w : specs) {
    for (double x1 : {0.0, 0.7, 2.5}) {
      for (double x2 : {0.1, 0.45, 0.9}) {
        const WaveValue c = eval_wave(w, x1, x2);
        const cplx d1 = (eval_wave(w, x1 + h, x2).value - eval_wave(w, x1 - h, x2).value) / (2 * h);
        const cplx d2 = (eval_wave(w, x1, x2 + h).value - eval_wave(w, x1, x2 - h).value) / (2 * h);
        const double scale = std::max(1.0, std::abs(c.gradient[0]) + std::abs(c.gradient[1]));
        EXPECT_LT(std::abs(d1 - c.gradient[0]), 1e-8 * scale);
        EXPECT_LT(std::abs(d2 - c.gradient[1]), 1e-8 * scale);
      }
    }
  }
}

TEST(EvalWave, HelmholtzHoldsPointwise) {
  const double h = 1e-3;
  for (auto fam : {WaveFamily::Oscillatory, WaveFamily::ExponentialCombo, WaveFamily::Stabilized}) {
    const WaveSpec w{fam, Sign::Minus, 7.0, Variant::NeumannEven};
    const double x1 = 0.8, x2 = 0.3;
    const cplx lap = (eval_wave(w, x1 + h, x2).value + eval_wave(w, x1 - h, x2).value +
                      eval_wave(w, x1, x2 + h).value + eval_wave(w, x1, x2 - h).value -
                      4.0 * eval_wave(w, x1, x2).value) /
                     (h * h);
    EXPECT_LT(std::abs(lap + 7.0 * eval_wave(w, x1, x2).value), 1e-4);
  }
}

TEST(EvalWave, ConjugationSymmetry) {
  for (double lambda : {1.0, 5.0, 9.5}) {
    for (auto fam : {WaveFamily::Oscillatory, WaveFamily::ExponentialCombo, WaveFamily::Stabilized}) {
      const WaveSpec plus{fam, Sign::Plus, lambda, Variant::NeumannEven};
      const WaveSpec minus{fam, Sign::Minus, lambda, Variant::NeumannEven};
      for (double x1 : {0.0, 1.3, 4.0}) {
        for (double x2 : {0.0, 0.6}) {
          EXPECT_LT(std::abs(eval_wave(plus, x1, x2).value -
                             std::conj(eval_wave(minus, x1, x2).value)),
                    1e-13 * std::max(1.0, std::abs(eval_wave(plus, x1, x2).value)));
        }
      }
    }
  }
}

TEST(EvalWave, ModalFormMatchesClosedForm) {
  for (auto fam : {WaveFamily::Oscillatory, WaveFamily::ExponentialRaw,
                   WaveFamily::ExponentialCombo, WaveFamily::Stabilized}) {
    const WaveSpec w{fam, Sign::Plus, 3.3, Variant::NeumannOdd};
    const ModalWave m = to_modal(w);
    for (double x1 : {0.0, 1.0, 2.0}) {
      const WaveValue a = eval_wave(w, x1, 0.25);
      const WaveValue b = m.eval(x1, 0.25);
      EXPECT_LT(std::abs(a.value - b.value), 1e-12 * std::max(1.0, std::abs(a.value)));
      EXPECT_LT(std::abs(a.gradient[0] - b.gradient[0]), 1e-12 * std::max(1.0, std::abs(a.gradient[0])));
    }
  }
}

TEST(Symplectic, SpecExamples) {
  const double lambda = 4.0;
  const auto osc = [&](Sign s) { return WaveSpec{WaveFamily::Oscillatory, s, lambda, Variant::NeumannEven}; };
  const auto raw = [&](Sign s) { return WaveSpec{WaveFamily::ExponentialRaw, s, lambda, Variant::NeumannEven}; };
  EXPECT_LT(std::abs(symplectic_form(osc(Sign::Plus), osc(Sign::Plus)) - kI), 1e-14);
  EXPECT_LT(std::abs(symplectic_form(osc(Sign::Minus), osc(Sign::Minus)) + kI), 1e-14);
  EXPECT_LT(std::abs(symplectic_form(raw(Sign::Plus), raw(Sign::Plus))), 1e-14);
  EXPECT_LT(std::abs(symplectic_form(raw(Sign::Plus), raw(Sign::Minus)) - 1.0), 1e-14);
  EXPECT_LT(std::abs(symplectic_form(raw(Sign::Minus), raw(Sign::Plus)) + 1.0), 1e-14);
}

TEST(Symplectic, BiorthogonalityTableAtRandomLambdas) {
  for (double lambda : random_lambdas(kPi2, 20, 20261016u)) {
    check_table(WaveBasis::Standard, Variant::NeumannEven, lambda);
    check_table(WaveBasis::Stabilized, Variant::NeumannEven, lambda);
    check_table(WaveBasis::Standard, Variant::NeumannOdd, lambda);
  }
  for (double lambda : random_lambdas(kPi2 / 4.0, 20, 7u)) {
    check_table(WaveBasis::Standard, Variant::MixedTopDirichlet, lambda);
    check_table(WaveBasis::Stabilized, Variant::MixedTopDirichlet, lambda);
  }
  for (double lambda : random_lambdas(kPi2, 20, 11u)) {
    check_table(WaveBasis::Standard, Variant::DirichletEven, lambda);
  }
  check_table(WaveBasis::Threshold, Variant::NeumannEven, kPi2);
  check_table(WaveBasis::Threshold, Variant::MixedTopDirichlet, kPi2 / 4.0);
  check_table(WaveBasis::Threshold, Variant::DirichletEven, kPi2);
}

TEST(Symplectic, RawExponentialRelations) {
  for (double lambda : random_lambdas(kPi2, 20, 3u)) {
    const WaveSpec vp{WaveFamily::ExponentialRaw, Sign::Plus, lambda, Variant::NeumannEven};
    const WaveSpec vm{WaveFamily::ExponentialRaw, Sign::Minus, lambda, Variant::NeumannEven};
    EXPECT_LT(std::abs(symplectic_form(vp, vp)), 1e-12);
    EXPECT_LT(std::abs(symplectic_form(vm, vm)), 1e-12);
    EXPECT_LT(std::abs(symplectic_form(vp, vm) - 1.0), 1e-12);
    EXPECT_LT(std::abs(symplectic_form(vm, vp) + 1.0), 1e-12);
  }
}

TEST(Symplectic, AgreesWithQuadratureAndIsIndependentOfR) {
  std::vector<WaveSpec> specs;
  for (double lambda : {2.0, 7.5, 9.8}) {
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      for (auto fam : {WaveFamily::Oscillatory, WaveFamily::ExponentialRaw,
                       WaveFamily::ExponentialCombo, WaveFamily::Stabilized}) {
        specs.push_back({fam, s, lambda, Variant::NeumannEven});
      }
    }
  }
  for (const auto& w : specs) {
    for (const auto& v : specs) {
      if (w.lambda != v.lambda) continue;
      const cplx q1 = symplectic_form(w, v, 1.0);
      for (double R : {1.0, 2.0, 3.0}) {
        const cplx qq = quadrature_form(w, v, R);
        // Quadrature rounding grows with the largest wave magnitude on the section.
        const double mag = std::abs(eval_wave(w, R, 0.0).value) * std::abs(eval_wave(v, R, 0.0).gradient[0]) +
                           std::abs(eval_wave(v, R, 0.0).value) * std::abs(eval_wave(w, R, 0.0).gradient[0]);
        EXPECT_LT(std::abs(qq - q1), 1e-12 * std::max(1.0, mag));
      }
      for (double R : {1.0, 7.0, 23.0, 50.0}) {
        EXPECT_LE(std::abs(symplectic_form(w, v, R) - q1), 1e-12);
      }
    }
  }
}

TEST(Symplectic, RejectsMismatchedArguments) {
  const WaveSpec a{WaveFamily::Oscillatory, Sign::Plus, 4.0, Variant::NeumannEven};
  const WaveSpec b{WaveFamily::ExponentialCombo, Sign::Plus, 2.0, Variant::MixedTopDirichlet};
  const WaveSpec c{WaveFamily::Oscillatory, Sign::Plus, 5.0, Variant::NeumannEven};
  EXPECT_THROW(symplectic_form(a, b), DomainError);
  EXPECT_THROW(symplectic_form(a, c), DomainError);
  EXPECT_THROW(symplectic_form(a, a, 0.0), DomainError);
}

TEST(Stabilized, ConvergesToThresholdWaves) {
  std::vector<double> sups;
  const std::vector<double> deltas{1e-2, 1e-4, 1e-6};
  for (double d : deltas) {
    double sup = 0.0;
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const WaveSpec a{WaveFamily::Stabilized, s, kPi2 - d, Variant::NeumannEven};
      const WaveSpec b{WaveFamily::ThresholdLinear, s, kPi2, Variant::NeumannEven};
      sup = std::max(sup, sup_difference(a, b));
    }
    sups.push_back(sup);
    // Bounded by a multiple of (π² - λ)^{1/2} x1 over x1 ≤ 3.
    EXPECT_LT(sup, 3.0 * std::sqrt(d)) << "δ=" << d;
  }
  // Each hundredfold reduction of π² - λ shrinks the gap at least tenfold.
  for (std::size_t i = 0; i + 1 < sups.size(); ++i) EXPECT_GT(sups[i] / sups[i + 1], 10.0);
}

TEST(Stabilized, OscillatoryMemberConvergesToo) {
  double prev = 1.0;
  for (double d : {1e-2, 1e-4, 1e-6}) {
    double sup = 0.0;
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const WaveSpec a{WaveFamily::Oscillatory, s, kPi2 - d, Variant::NeumannEven};
      const WaveSpec b{WaveFamily::ThresholdOscillatory, s, kPi2, Variant::NeumannEven};
      sup = std::max(sup, sup_difference(a, b));
    }
    EXPECT_LT(sup, d);
    EXPECT_LT(sup, prev);
    prev = sup;
  }
}
