#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "focklab/special.hpp"
#include "focklab/symbols.hpp"
#include "generators.hpp"

using namespace focklab;
using focklab::testing::Gen;

namespace {

/// Gauss-Hermite nodes and weights from the Jacobi matrix (Golub-Welsch).
std::pair<Eigen::VectorXd, Eigen::VectorXd> hermite_rule(int m) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const Eigen::VectorXd w = std::sqrt(kPi) * es.eigenvectors().row(0).transpose().array().square();
  return {es.eigenvalues(), w};
}

/// (g_s * f)(z) = (1/pi) int e^{-|u|^2} f(z - sqrt(s) u) du by tensor Gauss-Hermite.
Complex heat_oracle(const Symbol& f, double s, const Point& z, int m = 90) {
  static const auto rule = hermite_rule(m);
  const auto& [x, w] = rule;
  Complex sum = 0.0;
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < x.size(); ++j) sum += w(i) * w(j) * f(z - std::sqrt(s) * Point{Complex(x(i), x(j))});
  return sum / kPi;
}

}  // namespace

TEST(Heat, GaussianClosedForm) {
  Gen gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = gen.uniform(0.2, 5.0), s = gen.uniform(0.1, 3.0);
    const Point z = gen.point(1, 3.0);
    EXPECT_NEAR(heat_transform(Symbol::gaussian(a), s, z).value.real(), a / (a + s) * std::exp(-z.norm2() / (a + s)),
                1e-15);
  }
}

TEST(Heat, TwoDimensionalGaussianFactorizes) {
  const Point z{Complex(0.3, 0.1), Complex(-0.5, 0.4)};
  const double expected = std::pow(1.0 / 1.5, 2) * std::exp(-z.norm2() / 1.5);
  EXPECT_NEAR(heat_transform(Symbol::gaussian(1.0), 0.5, z).value.real(), expected, 1e-15);
}

TEST(Heat, ClosedFamiliesMatchHermiteOracle) {
  Gen gen(2);
  for (int trial = 0; trial < 25; ++trial) {
    const Symbol f = gen.closed_symbol();
    const double s = gen.uniform(0.2, 1.0);
    const Point z = gen.point(1, 2.0);
    EXPECT_LT(std::abs(heat_transform(f, s, z).value - heat_oracle(f, s, z)), 1e-9) << f.describe();
  }
}

TEST(Heat, SmoothSignMatchesHermiteOracle) {
  const Symbol f = Symbol::smooth_sign(Point{Complex(0.6, 0.8)}, 1.5);
  const Point z{Complex(0.4, -0.9)};
  EXPECT_LT(std::abs(heat_transform(f, 0.5, z).value - heat_oracle(f, 0.5, z)), 1e-8);
}

TEST(Heat, CommutesWithTranslation) {
  Gen gen(3);
  for (int trial = 0; trial < 12; ++trial) {
    const Symbol f = trial % 2 ? gen.closed_symbol() : gen.bounded_symbol();
    const Point z = gen.point(1, 2.0), w = gen.point(1, 2.0);
    const double s = gen.uniform(0.3, 1.2);
    EXPECT_LT(std::abs(heat_transform(f.translate(z), s, w).value - heat_transform(f, s, w - z).value), 1e-10)
        << f.describe();
  }
}

TEST(Heat, NeverExceedsSupNorm) {
  Gen gen(4);
  for (int trial = 0; trial < 12; ++trial) {
    const Symbol f = gen.bounded_symbol();
    const double s = gen.uniform(0.3, 2.0);
    const HeatValue v = heat_transform(f, s, gen.point(1, 4.0));
    EXPECT_LE(std::abs(v.value), f.bound() + v.errorBound + 1e-12) << f.describe();
  }
  for (int trial = 0; trial < 12; ++trial) {
    const Symbol f = gen.closed_symbol();
    EXPECT_LE(heat_sup(f, gen.uniform(0.3, 2.0), 1), f.bound() + 1e-12) << f.describe();
  }
}

TEST(Heat, SemigroupOnClosedFamilies) {
  Gen gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Symbol f = gen.closed_symbol();
    const double r = gen.uniform(0.1, 1.0), s = gen.uniform(0.1, 1.0);
    const Point z = gen.point(1, 2.0);
    EXPECT_LT(std::abs(heat_transform(heat_symbol(f, r, 1), s, z).value - heat_transform(f, r + s, z).value), 1e-12);
  }
}

TEST(Heat, QuadratureRouteMatchesClosedRoute) {
  const Symbol f = Symbol::poly_gaussian({1.0, Complex(0.3, -0.2)}, 1.3).translate(Point{Complex(0.5, 0.5)});
  const Symbol wrapped = Symbol::callable([f](const Point& z) { return f(z); }, f.bound(), {SymbolTag::Bounded}, "w");
  const Point z{Complex(-0.7, 1.1)};
  const HeatValue q = heat_transform(wrapped, 0.8, z);
  EXPECT_EQ(q.method, HeatMethod::Quadrature);
  EXPECT_LT(std::abs(q.value - heat_transform(f, 0.8, z).value), 1e-10);
}

TEST(Heat, SupOfOscillatoryIsComplexGaussianModulus) {
  // |(1 - i a s)^{-1}| at the origin, where the modulus of the transform peaks.
  for (double a : {1.0, 4.0})
    for (double s : {0.4, 1.2}) EXPECT_NEAR(heat_sup(Symbol::oscillatory(a), s, 1), 1.0 / std::hypot(1.0, a * s), 1e-14);
}

TEST(GroupActions, DilatedGaussianIsGaussian) {
  Gen gen(6);
  const Symbol f = Symbol::gaussian(2.0).dilate(3.0), g = Symbol::gaussian(2.0 / 9.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Point z = gen.point(1, 1.0);
    EXPECT_NEAR(std::abs(f(z) - g(z)), 0.0, 1e-15);
  }
}

TEST(GroupActions, TranslationsComposeAndReflectionIsInvolutive) {
  Gen gen(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Symbol f = gen.bounded_symbol();
    const Point z = gen.point(1, 2.0), w = gen.point(1, 2.0), u = gen.point(1, 3.0);
    EXPECT_LT(std::abs(f.translate(z).translate(w)(u) - f.translate(z + w)(u)), 1e-13);
    EXPECT_EQ(f.reflect().reflect()(u), f(u));
    EXPECT_LT(std::abs(f.translate(z)(u) - f(u - z)), 1e-13);
  }
}

TEST(Regularity, SinSqrtOscillationDecaysWithMeanValueBound) {
  double prev = 1e9;
  for (double R : {10.0, 40.0, 160.0}) {
    const double v = vo_modulus(Symbol::sin_sqrt(), R).value;
    EXPECT_LT(v, prev);
    EXPECT_LE(v, 1.0 / (2.0 * std::sqrt(R)) + 1e-12);
    prev = v;
  }
  EXPECT_TRUE(check_tag(Symbol::sin_sqrt(), SymbolTag::VanishingOscillation, {10.0, 40.0, 160.0}).passed);
}

TEST(Regularity, AngularOscillationDecaysLikeInverseRadius) {
  const Symbol f = Symbol::angular({{1, 1.0}}, 1.0);
  const double v10 = vo_modulus(f, 10.0).value, v80 = vo_modulus(f, 80.0).value;
  EXPECT_NEAR(v10 / v80, 8.0, 1.0);
}

TEST(Regularity, GaussianTailsFrozen) {
  EXPECT_LT(c0_tail(Symbol::gaussian(1.0), 6.0).value, 1e-15);
  EXPECT_NEAR(c0_tail(Symbol::gaussian(1.0), 6.0).value, std::exp(-36.0), 1e-25);
  const Symbol heat = heat_symbol(Symbol::gaussian(1.0), 1.0, 1);
  EXPECT_NEAR(c0_tail(heat, 2.0).value, 0.5 * std::exp(-2.0), 1e-15);
}

TEST(Regularity, HeatTailDecayImpliesSymbolTailDecay) {
  const std::vector<double> radii{4.0, 16.0, 64.0, 256.0};
  const std::vector<Symbol> family{Symbol::gaussian(1.0), Symbol::gaussian(3.0),
                                   Symbol::angular({{1, 1.0}}, 1.0) * Symbol::inv_log(), Symbol::inv_log(),
                                   Symbol::constant(1.0), Symbol::angular({{1, 1.0}}, 1.0)};
  for (const Symbol& f : family) {
    const bool heat = check_tag(heat_symbol(f, 1.0, 1), SymbolTag::C0, radii).passed;
    const bool symbol = check_tag(f, SymbolTag::C0, radii).passed;
    if (heat) EXPECT_TRUE(symbol) << f.describe();
  }
}

TEST(Regularity, ConstantFailsC0AndPassesBounded) {
  EXPECT_FALSE(check_tag(Symbol::constant(1.0), SymbolTag::C0, {4.0, 8.0, 16.0}).passed);
  EXPECT_TRUE(check_tag(Symbol::constant(1.0), SymbolTag::Bounded, {4.0, 8.0, 16.0}).passed);
}

TEST(Json, RoundTripPreservesValues) {
  Gen gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Symbol f = gen.bounded_symbol();
    const Symbol g = symbol_from_json(symbol_to_json(f));
    for (int k = 0; k < 5; ++k) {
      const Point z = gen.point(1, 5.0);
      EXPECT_EQ(f(z), g(z)) << symbol_to_json(f).dump();
    }
    EXPECT_EQ(f.tags(), g.tags());
  }
}

TEST(Json, RejectsUnknownKeysAndFamilies) {
  EXPECT_THROW(symbol_from_json(nlohmann::json{{"family", "gaussian"}, {"a", 1.0}, {"width", 2.0}}), Error);
  EXPECT_THROW(symbol_from_json(nlohmann::json{{"family", "bessel"}}), Error);
  EXPECT_THROW(symbol_from_json(nlohmann::json{{"family", "gaussian"}, {"a", "wide"}}), Error);
  const Symbol c = Symbol::callable([](const Point&) { return Complex(1.0); }, 1.0, {SymbolTag::Bounded}, "one");
  EXPECT_THROW(symbol_to_json(c), Error);
}

TEST(RadialSampled, InterpolatesMonotoneAndRejectsExtrapolation) {
  const Symbol f = Symbol::radial_sampled({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.5, 1.6});
  EXPECT_NEAR(f(Point{Complex(2.0)}).real(), 1.5, 1e-15);
  double prev = -1.0;
  for (double r = 0.0; r <= 3.0; r += 0.05) {
    const double v = f(Point{Complex(r)}).real();
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
  EXPECT_THROW(f(Point{Complex(3.5)}), Error);
}

TEST(SmoothStep, EndpointsAndMonotonicity) {
  EXPECT_EQ(special::smooth_step(-0.1), 0.0);
  EXPECT_EQ(special::smooth_step(1.2), 1.0);
  EXPECT_NEAR(special::smooth_step(0.5), 0.5, 1e-15);
  for (double x = 0.0; x < 1.0; x += 0.01) EXPECT_LE(special::smooth_step(x), special::smooth_step(x + 0.01));
}
