#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "focklab/limits.hpp"
#include "generators.hpp"

using namespace focklab;
using focklab::testing::Gen;

namespace {

const std::vector<double> kRadii{1e2, 1e3, 1e4, 1e5, 1e6};

Symbol unit_angular() { return Symbol::angular({{1, 1.0}}, 1.0); }

/// Berezin transform of diag(d_k) on the truncation |alpha| <= N with the
/// renormalized kernel: sum d_k x^k/k! / sum x^k/k!, x = |z|^2/t.
double diagonal_berezin_oracle(const std::function<double(int)>& d, int N, double x) {
  double num = 0.0, den = 0.0, logTerm = -x;
  for (int k = 0; k <= N; ++k) {
    const double w = std::exp(logTerm);
    num += d(k) * w;
    den += w;
    logTerm += std::log(x) - std::log(k + 1.0);
  }
  return num / den;
}

}  // namespace

TEST(Direction, RejectsDegenerateNets) {
  EXPECT_THROW(DirectionApproximant::angle(0.0, {1.0, 2.0}), Error);
  EXPECT_THROW(DirectionApproximant::angle(0.0, {1.0, 3.0, 2.0}), Error);
  EXPECT_THROW(DirectionApproximant(Point{Complex(0.0)}, {1.0, 2.0, 3.0}), Error);
  EXPECT_NO_THROW(DirectionApproximant::angle(0.5, {1.0, 2.0, 3.0}));
}

TEST(LimitSymbol, AngularLimitIsAntipodalValueAndConstantInW) {
  Gen gen(21);
  for (int trial = 0; trial < 6; ++trial) {
    const double th = gen.uniform(0.0, 2.0 * kPi);
    const LimitVerdict v = limit_symbol(unit_angular(), DirectionApproximant::angle(th, kRadii, 1e-4), gen.point(1, 0.5));
    EXPECT_TRUE(v.converged);
    EXPECT_TRUE(v.constantInW);
    EXPECT_LT(std::abs(v.value - std::polar(1.0, th + kPi)), 1e-6);
  }
}

TEST(LimitSymbol, C0SymbolsTendToZero) {
  for (const Symbol& f : {Symbol::gaussian(1.0), Symbol::poly_gaussian({1.0, 0.5}, 2.0)}) {
    const LimitVerdict v = limit_symbol(f, DirectionApproximant::angle(1.0, kRadii), Point::zero(1));
    EXPECT_TRUE(v.converged) << f.describe();
    EXPECT_LT(std::abs(v.value), 1e-6) << f.describe();
  }
}

TEST(LimitSymbol, RadialOscillationIsReportedUnconverged) {
  LimitVerdict v;
  EXPECT_NO_THROW(v = limit_symbol(Symbol::sin_sqrt(), DirectionApproximant::angle(0.3, kRadii), Point::zero(1)));
  EXPECT_FALSE(v.converged);
  EXPECT_EQ(v.profile.size(), kRadii.size() - 1);
}

TEST(LimitOperator, AngularSymbolGivesScalarOperator) {
  const BasisPtr basis = MultiIndexBasis::make(1.0, 1, 24);
  const double th = 0.3;
  const LimitVerdict v =
      limit_operator(unit_angular(), DirectionApproximant::angle(th, {256.0, 1024.0, 4096.0, 16384.0}, 1e-2), basis);
  ASSERT_TRUE(v.limitOperator.has_value());
  EXPECT_TRUE(v.converged);
  EXPECT_LT(half_block_distance(*v.limitOperator, std::polar(1.0, th + kPi) * OperatorMatrix::identity(basis)), 1e-12);
  for (std::size_t i = 1; i < v.profile.size(); ++i) EXPECT_LT(v.profile[i], v.profile[i - 1]);
}

TEST(LimitOperator, ConstantPlusBumpGivesTheConstant) {
  const BasisPtr basis = MultiIndexBasis::make(1.0, 1, 24);
  const Complex c(2.0, 0.5);
  const LimitVerdict v = limit_operator(Symbol::constant(c) + Symbol::gaussian(1.0),
                                        DirectionApproximant::angle(0.3, {16.0, 32.0, 64.0}, 1e-12), basis);
  EXPECT_TRUE(v.converged);
  EXPECT_LT(std::abs(v.value - c), 1e-12);
}

TEST(LimitOperator, TranslationInvariance) {
  const BasisPtr basis = MultiIndexBasis::make(1.0, 1, 24);
  const DirectionApproximant far = DirectionApproximant::angle(1.2, {256.0, 1024.0, 4096.0, 16384.0}, 1e-2);
  const LimitVerdict a = limit_operator(unit_angular(), far, basis);
  const LimitVerdict b = limit_operator(unit_angular().translate(Point{Complex(0.7, -0.4)}), far, basis);
  ASSERT_TRUE(a.limitOperator && b.limitOperator);
  EXPECT_LT(half_block_distance(*a.limitOperator, *b.limitOperator), 1e-2);
}

TEST(EssentialSpectrum, AngularSymbolFillsTheUnitCircle) {
  const EssentialSpectrum es = essential_spectrum_vo(unit_angular(), angle_grid(12));
  ASSERT_TRUE(es.ok()) << es.status;
  ASSERT_EQ(es.samples.size(), 12u);
  for (std::size_t i = 0; i < es.samples.size(); ++i) {
    EXPECT_NEAR(std::abs(es.samples[i]), 1.0, 1e-6);
    EXPECT_LT(std::abs(es.samples[i] - std::polar(1.0, es.thetas[i] + kPi)), 1e-6);
  }
}

TEST(EssentialSpectrum, InvariantUnderC0Perturbation) {
  const auto thetas = angle_grid(8);
  const EssentialSpectrum a = essential_spectrum_vo(unit_angular(), thetas);
  const EssentialSpectrum b = essential_spectrum_vo(unit_angular() + Symbol::gaussian(2.0), thetas);
  ASSERT_TRUE(a.ok() && b.ok());
  for (std::size_t i = 0; i < thetas.size(); ++i) EXPECT_LT(std::abs(a.samples[i] - b.samples[i]), 1e-6);
}

TEST(EssentialSpectrum, RadialOscillationIsFlagged) {
  const EssentialSpectrum es = essential_spectrum_vo(Symbol::sin_sqrt(), angle_grid(4));
  EXPECT_EQ(es.status, "radial VO with non-directional boundary");
  EXPECT_FALSE(es.ok());
}

TEST(EssentialSpectrum, AngleGridIsEquispaced) {
  const auto g = angle_grid(5);
  ASSERT_EQ(g.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(g[static_cast<std::size_t>(i)], 2.0 * kPi * i / 5.0, 1e-15);
}

TEST(Fredholm, WitnessSeparatesPointsOffAndOnTheEssentialSpectrum) {
  const BasisPtr basis = MultiIndexBasis::make(1.0, 1, 128);
  const std::vector<double> radii{4.0, 6.0, 8.0};
  const FredholmWitness pass = fredholm_witness(unit_angular(), 3.0, basis, radii);
  EXPECT_TRUE(pass.passed) << pass.detail;
  EXPECT_GT(pass.margin, 1.0);
  const FredholmWitness fail = fredholm_witness(unit_angular(), 1.0, basis, radii);
  EXPECT_FALSE(fail.passed) << fail.detail;
}

TEST(Fredholm, ZeroSymbolHasNoDefect) {
  const FredholmWitness w =
      fredholm_witness(Symbol::constant(0.0), 1.0, MultiIndexBasis::make(1.0, 1, 32), {4.0, 6.0, 8.0});
  ASSERT_EQ(w.tails.size(), 3u);
  EXPECT_LT(*std::max_element(w.tails.begin(), w.tails.end()), 1e-12);
}

TEST(Compactness, GaussianToeplitzSingularValuesAndTailMatchOracles) {
  const double t = 1.0;
  const std::vector<int> ladder{48, 96};
  const std::vector<double> radii{4.0, 6.0, 8.0};
  const CompactnessProfile p = compactness_probe(
      [](const BasisPtr& b) { return toeplitz_matrix(Symbol::gaussian(1.0), b); }, t, 1, ladder, radii);
  for (int k = 0; k <= 40; ++k) EXPECT_NEAR(p.singularValues(k), std::pow(2.0, -(k + 1)), 1e-13) << k;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double x = radii[i] * radii[i] / t;
    const double oracle = diagonal_berezin_oracle([](int k) { return std::pow(0.5, k + 1); }, ladder.back(), x);
    EXPECT_NEAR(p.tails[i], oracle, 1e-12 * std::max(1.0, oracle) + 1e-3 * oracle);
    EXPECT_NEAR(p.tails[i], 0.5 * std::exp(-x / 2.0), 1e-3 * 0.5 * std::exp(-x / 2.0));
  }
  EXPECT_TRUE(p.compact());
}

TEST(Compactness, RankOneTailIsTheRenormalizedVacuumWeight) {
  const std::vector<double> radii{4.0, 6.0, 8.0};
  const CompactnessProfile p = compactness_probe(
      [](const BasisPtr& b) {
        TruncatedVector one(b);
        one.coeffs(0) = 1.0;
        return rank_one(one, one);
      },
      1.0, 1, {48, 96}, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double x = radii[i] * radii[i];
    const double oracle = diagonal_berezin_oracle([](int k) { return k == 0 ? 1.0 : 0.0; }, 96, x);
    EXPECT_NEAR(p.tails[i] / oracle, 1.0, 1e-8);
  }
  EXPECT_NEAR(p.singularValues(0), 1.0, 1e-14);
  EXPECT_LT(p.singularValues(1), 1e-14);
  EXPECT_TRUE(p.compact());
}

TEST(Compactness, IdentityAndConstantsAreNotCompact) {
  for (const OperatorFactory& f : std::vector<OperatorFactory>{
           [](const BasisPtr& b) { return OperatorMatrix::identity(b); },
           [](const BasisPtr& b) { return toeplitz_matrix(Symbol::constant(2.0), b); }}) {
    const CompactnessProfile p = compactness_probe(f, 1.0, 1, {48, 96}, {4.0, 6.0, 8.0});
    EXPECT_FALSE(p.compact());
    EXPECT_FALSE(p.tailDecays);
  }
}

TEST(Compactness, VerdictStableAcrossLadders) {
  const OperatorFactory ks = [](const BasisPtr& b) { return k_s_matrix(b, 0.5); };
  const CompactnessProfile a = compactness_probe(ks, 1.0, 1, {48, 96}, {4.0, 6.0, 8.0});
  const CompactnessProfile b = compactness_probe(ks, 1.0, 1, {64, 128}, {4.0, 6.0, 8.0});
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_TRUE(a.compact());
}

TEST(Commutator, VanishingOscillationAgainstUniformlyContinuousIsCompact) {
  const CommutatorProfile p =
      commutator_probe(Symbol::sin_sqrt(), unit_angular(), 1.0, {64, 128}, {4.0, 6.0, 8.0});
  EXPECT_TRUE(p.fIsVO);
  EXPECT_TRUE(p.gIsBUC);
  EXPECT_TRUE(p.probe.compact()) << p.probe.verdict;
}

TEST(Commutator, NonVanishingOscillationControlStalls) {
  const CommutatorProfile p = commutator_probe(Symbol::smooth_sign(Point{1.0}, 1.0),
                                               Symbol::plane_wave(Point{Complex(0.0, 1.0)}), 1.0, {64, 128},
                                               {4.0, 6.0, 8.0});
  EXPECT_FALSE(p.fIsVO);
  EXPECT_FALSE(p.probe.compact());
}

TEST(Commutator, ConstantCommutesExactly) {
  const CommutatorProfile p = commutator_probe(Symbol::constant(2.0), unit_angular(), 1.0, {32, 64}, {4.0, 6.0});
  EXPECT_EQ(p.maxEntry, 0.0);
}

TEST(SlowOscillation, ProxiesAgreeOnReferenceSymbols) {
  const std::vector<double> radii{4.0, 16.0, 64.0, 256.0};
  EXPECT_EQ(slow_oscillation_equivalence(Symbol::gaussian(1.0), 1.0, radii).verdict, "all-pass");
  EXPECT_EQ(slow_oscillation_equivalence(Symbol::constant(1.0), 1.0, radii).verdict, "all-fail");
  EXPECT_EQ(slow_oscillation_equivalence(Symbol::inv_log(), 1.0, radii).verdict, "all-pass");
}

TEST(BoundaryExtension, ReproducesDataAtTheAntipode) {
  auto phi = [](double th) { return std::polar(1.0, th) + 0.25 * std::polar(1.0, -2.0 * th); };
  const Symbol f = extend_boundary_symbol(phi, 1.0);
  for (double th : angle_grid(7)) {
    const LimitVerdict v = limit_symbol(f, DirectionApproximant::angle(th, kRadii), Point::zero(1));
    EXPECT_TRUE(v.converged);
    EXPECT_LT(std::abs(v.value - phi(th + kPi)), 1e-6);
  }
  EXPECT_EQ(f(Point{Complex(0.5, 0.2)}), Complex(0.0));
}

TEST(BoundaryExtension, CutoffChoiceChangesOnlyByC0) {
  auto phi = [](double th) { return std::polar(1.0, th); };
  const Symbol d = extend_boundary_symbol(phi, 1.0) - extend_boundary_symbol(phi, 2.5);
  EXPECT_EQ(c0_tail(d, 4.0).value, 0.0);
}

TEST(BoundaryExtension, RejectsDiscontinuousData) {
  EXPECT_THROW(extend_boundary_symbol([](double th) { return th < kPi ? Complex(1.0) : Complex(-1.0); }, 1.0), Error);
}
