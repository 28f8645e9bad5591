#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "focklab/fock_core.hpp"
#include "focklab/operators.hpp"
#include "generators.hpp"

using namespace focklab;
using focklab::testing::Gen;

namespace {

/// <T_f e_k, e_k> for f = exp(-|z|^2/a) as the Gamma integral
/// (1/(t^{k+1} k!)) int_0^inf u^k e^{-u(1/t + 1/a)} du, evaluated by Simpson.
double gaussian_diagonal_oracle(int k, double a, double t) {
  const double c = 1.0 / t + 1.0 / a;
  const double U = (k + 60.0) / c;
  const int m = 20000;
  const double h = U / m;
  auto g = [&](double u) {
    return u <= 0.0 ? (k == 0 ? 1.0 / t : 0.0) : std::exp(k * std::log(u) - c * u - (k + 1) * std::log(t) - std::lgamma(k + 1.0));
  };
  double s = g(0.0) + g(U);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return s * h / 3.0;
}

Symbol wrap(const Symbol& f) {
  return Symbol::callable([f](const Point& z) { return f(z); }, f.bound(), {SymbolTag::Bounded}, "wrapped");
}

}  // namespace

TEST(Toeplitz, GaussianDiagonalMatchesGammaOracle) {
  for (double t : {1.0, 0.5, 2.0}) {
    const BasisPtr b = MultiIndexBasis::make(t, 1, 30);
    const OperatorMatrix m = toeplitz_matrix(Symbol::gaussian(1.0), b);
    for (int k = 0; k <= 30; ++k) {
      const double oracle = gaussian_diagonal_oracle(k, 1.0, t);
      EXPECT_NEAR(m(k, k).real(), oracle, 1e-10 * oracle) << "t=" << t << " k=" << k;
      EXPECT_NEAR(m(k, k).real(), std::pow(t + 1.0, -(k + 1)), 1e-10 * oracle);
    }
  }
}

TEST(Toeplitz, FrozenDiagonalAtUnitScale) {
  const OperatorMatrix m = toeplitz_matrix(Symbol::gaussian(1.0), MultiIndexBasis::make(1.0, 1, 4));
  EXPECT_NEAR(m(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(m(3, 3).real(), 0.0625, 1e-15);
}

TEST(Toeplitz, ConstantSymbolIsScalar) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 2, 5);
  const ToeplitzAssembly a = toeplitz_assemble(Symbol::constant(Complex(2.0, -1.0)), b);
  EXPECT_LT((a.matrix.entries() - Complex(2.0, -1.0) * Eigen::MatrixXcd::Identity(b->dim(), b->dim())).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(Toeplitz, RealSymbolsGiveHermitianMatrices) {
  Gen gen(31);
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 16);
  for (const Symbol& f : {Symbol::gaussian(2.0).translate(Point{Complex(0.5, -0.3)}), Symbol::sin_sqrt(),
                          Symbol::smooth_sign(Point{Complex(1.0, 1.0)}, 1.0)}) {
    ASSERT_TRUE(symbol_is_real(f));
    const Eigen::MatrixXcd m = toeplitz_matrix(f, b).entries();
    EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-14) << f.describe();
  }
}

TEST(Toeplitz, StructuredRoutesMatchGenericQuadrature) {
  Gen gen(37);
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 16);
  for (int trial = 0; trial < 6; ++trial) {
    const Symbol f = gen.closed_symbol();
    const ToeplitzAssembly direct = toeplitz_assemble(f, b);
    const ToeplitzAssembly generic = toeplitz_assemble(wrap(f), b);
    EXPECT_EQ(generic.method, "polar-quadrature");
    EXPECT_LT((direct.matrix.half_block() - generic.matrix.half_block()).cwiseAbs().maxCoeff(), 1e-9) << f.describe();
  }
}

TEST(Toeplitz, HermiteRouteForTwoCoordinates) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 2, 6);
  const Point u{Complex(0.5), Complex(0.0, 0.7)};
  const ToeplitzAssembly pw = toeplitz_assemble(Symbol::plane_wave(u), b);
  const BerezinEvaluator ev(pw.matrix);
  const Point z{Complex(0.2, 0.1), Complex(-0.1, 0.3)};
  EXPECT_LT(std::abs(ev(z).value - heat_transform(Symbol::plane_wave(u), 1.0, z).value), 1e-6);
}

TEST(Toeplitz, RejectsUnboundedSymbols) {
  const Symbol f = Symbol::callable([](const Point& z) { return Complex(z.norm2()); },
                                    std::numeric_limits<double>::infinity(), {}, "unbounded");
  EXPECT_THROW(toeplitz_matrix(f, MultiIndexBasis::make(1.0, 1, 4)), Error);
}

TEST(Berezin, IdentityMapsToOneExactly) {
  const BerezinEvaluator ev(OperatorMatrix::identity(MultiIndexBasis::make(1.0, 1, 12)));
  Gen gen(41);
  for (int trial = 0; trial < 10; ++trial) EXPECT_NEAR(std::abs(ev(gen.point(1, 6.0)).value - 1.0), 0.0, 1e-14);
}

TEST(Berezin, RankOneIsGaussian) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 40);
  TruncatedVector one(b);
  one.coeffs(0) = 1.0;
  const BerezinEvaluator ev(rank_one(one, one));
  Gen gen(43);
  for (int trial = 0; trial < 10; ++trial) {
    const Point z = gen.point(1, 2.0);
    EXPECT_NEAR(ev(z).value.real(), std::exp(-z.norm2()), 1e-12);
  }
}

TEST(Berezin, ToeplitzBerezinIsHeatTransform) {
  Gen gen(47);
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 32);
  for (int trial = 0; trial < 4; ++trial) {
    const Symbol f = gen.bounded_symbol();
    const BerezinEvaluator ev(toeplitz_matrix(f, b));
    const Point z = gen.point(1, 2.0);
    EXPECT_LT(std::abs(ev(z).value - heat_transform(f, 1.0, z).value), 1e-8) << f.describe();
  }
}

TEST(Berezin, ShiftCovariance) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 40);
  const OperatorMatrix a = toeplitz_matrix(Symbol::gaussian(1.5), b);
  const Point z{Complex(0.4, -0.3)};
  const BerezinEvaluator shifted(shift(a, z)), plain(a);
  Gen gen(53);
  for (int trial = 0; trial < 6; ++trial) {
    const Point w = gen.point(1, 1.0);
    EXPECT_LT(std::abs(shifted(w).value - plain(w - z).value), 1e-8);
  }
}

TEST(Shift, ToeplitzOfTranslateConvergesInTruncation) {
  const Symbol f = Symbol::gaussian(1.0);
  const Point z{Complex(0.8, 0.5)};
  double prev = 1e9;
  for (int N : {16, 32, 48}) {
    const BasisPtr b = MultiIndexBasis::make(1.0, 1, N);
    const double d = (shift(toeplitz_matrix(f, b), z).block(8) - toeplitz_matrix(f.translate(z), b).block(8)).norm();
    EXPECT_TRUE(d < prev || d < 1e-13) << N;
    prev = d;
  }
  EXPECT_LT(prev, 1e-9);
}

TEST(Shift, ContinuityBoundedBySymbolModulus) {
  // ||alpha_z(T_f) - T_f|| = ||T_{f(.-z) - f}|| <= sup|f(.-z) - f|, up to truncation.
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 24);
  const Symbol f = Symbol::angular({{1, 1.0}}, 1.0);
  for (double r : {0.05, 0.2}) {
    const Point z{Complex(r)};
    const double lhs = half_block_distance(toeplitz_matrix(f.translate(z), b), toeplitz_matrix(f, b));
    const Symbol diff = f.translate(z) - f;
    double sup = 0.0;
    for (int i = 0; i <= 80; ++i)
      for (int j = 0; j < 32; ++j) sup = std::max(sup, std::abs(diff(Point{std::polar(0.1 * i, 2.0 * kPi * j / 32)})));
    EXPECT_LE(lhs, 1.05 * sup);
  }
}

TEST(ModuleConvolution, CorrespondenceForTestOperators) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 24);
  const Symbol gt = heat_kernel(1.0, 1);
  const Symbol g = Symbol::gaussian(1.0);
  const OperatorMatrix conv = module_conv_padded(gt, [&](const BasisPtr& w) { return toeplitz_matrix(g, w); }, b, 12);
  const OperatorMatrix ref = toeplitz_matrix(heat_symbol(g, 1.0, 1), b);
  EXPECT_LT(spectral_norm(conv.half_block() - ref.half_block()) / spectral_norm(ref.half_block()), 1e-3);
}

TEST(ModuleConvolution, NormBoundAndRejection) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 12);
  const ModuleConvolution mc = module_conv(heat_kernel(0.5, 1), k_s_matrix(b, 0.5));
  EXPECT_TRUE(mc.normBoundHolds);
  EXPECT_NEAR(mc.l1Bound, 1.0, 1e-12);
  EXPECT_THROW(module_conv(Symbol::sin_sqrt(), OperatorMatrix::identity(b)), Error);
}

TEST(RankOne, TraceIsPairing) {
  Gen gen(59);
  const BasisPtr b = MultiIndexBasis::make(1.0, 2, 4);
  for (int trial = 0; trial < 10; ++trial) {
    const TruncatedVector u = gen.vector(b), v = gen.vector(b);
    EXPECT_LT(std::abs(rank_one(u, v).entries().trace() - v.coeffs.dot(u.coeffs)), 1e-14);
  }
}

TEST(Dilation, ConjugatedToeplitzMatchesDilatedSymbol) {
  for (double lambda : {0.5, 2.0}) {
    const BasisPtr b = MultiIndexBasis::make(1.0, 1, 20);
    for (const Symbol& f : {Symbol::gaussian(1.0), Symbol::poly_gaussian({1.0, -0.5, 0.25}, 1.5)}) {
      const OperatorMatrix lhs = dilation_conjugate(toeplitz_matrix(f, b), lambda);
      const OperatorMatrix rhs = toeplitz_matrix(f.dilate(1.0 / lambda), b->rescaled(lambda * lambda));
      EXPECT_LT((lhs.entries() - rhs.entries()).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(KOperator, DiagonalAndKernelLocalization) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 16);
  const OperatorMatrix k = k_s_matrix(b, 0.5);
  EXPECT_DOUBLE_EQ(k(3, 3).real(), 0.125);
  const KernelFn kern = matrix_kernel(k);
  Gen gen(61);
  for (int trial = 0; trial < 10; ++trial) {
    const Point z = gen.point(1, 1.5), w = gen.point(1, 1.5);
    EXPECT_LE(std::abs(kern(w, z)), std::exp(-0.5 * (z - w).norm2() / 2.0) + 1e-9);
  }
}

TEST(IntegralKernels, KernelMatchesMatrixProduct) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 20);
  const OperatorMatrix a = toeplitz_matrix(Symbol::gaussian(1.0), b);
  const KernelFn kern = matrix_kernel(a);
  const Point w{Complex(0.3, 0.2)}, z{Complex(-0.4, 0.1)};
  const Eigen::VectorXcd kw = normalized_kernel_expand(b, w).vector.coeffs;
  const Eigen::VectorXcd kz = normalized_kernel_expand(b, z).vector.coeffs;
  EXPECT_LT(std::abs(kern(w, z) - kz.dot(a.entries() * kw)), 1e-14);
}

TEST(IntegralKernels, ApplyReproducesMatrixAction) {
  Gen gen(67);
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 14);
  const OperatorMatrix a = toeplitz_matrix(Symbol::gaussian(0.8), b);
  const TruncatedVector v = gen.vector(b);
  const IntegralApplyResult r = integral_apply(matrix_kernel(a), v);
  EXPECT_LT((r.vector.coeffs - a.apply(v).coeffs).norm(), 1e-10);
  EXPECT_TRUE(r.fit.certified);
}

TEST(NormEstimate, FrozenGaussianNormAndBrackets) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 24);
  const OperatorMatrix a = toeplitz_matrix(Symbol::gaussian(1.0), b);
  const NormEstimate two = norm_estimate(a, NormExponent::Two);
  EXPECT_NEAR(two.lower, 0.5, 1e-14);
  EXPECT_EQ(two.lower, two.upper);
  Gen gen(71);
  for (int trial = 0; trial < 3; ++trial) {
    const OperatorMatrix m = toeplitz_matrix(gen.closed_symbol(), MultiIndexBasis::make(1.0, 1, 8));
    for (NormExponent p : {NormExponent::One, NormExponent::Infinity}) {
      const NormEstimate e = norm_estimate(m, p, {7, 2, 4});
      EXPECT_LE(e.lower, e.upper);
    }
  }
}

TEST(NormEstimate, StabilizesWhenTruncationDoubles) {
  for (double a : {0.5, 1.0, 3.0}) {
    const double n1 = norm_estimate(toeplitz_matrix(Symbol::gaussian(a), MultiIndexBasis::make(1.0, 1, 24)),
                                    NormExponent::Two).upper;
    const double n2 = norm_estimate(toeplitz_matrix(Symbol::gaussian(a), MultiIndexBasis::make(1.0, 1, 48)),
                                    NormExponent::Two).upper;
    EXPECT_NEAR(n1, n2, 1e-6);
  }
}

TEST(MatrixCsv, RoundTripIsExact) {
  Gen gen(73);
  const BasisPtr b = MultiIndexBasis::make(0.7, 2, 3);
  const OperatorMatrix a = toeplitz_matrix(Symbol::gaussian(1.0).translate(gen.point(2, 1.0)), b);
  std::stringstream ss;
  write_matrix_csv(a, ss);
  const OperatorMatrix back = read_matrix_csv(ss);
  EXPECT_TRUE(back.basis()->same_as(*b));
  EXPECT_EQ(back.entries(), a.entries());
  std::stringstream bad("not a matrix\n");
  EXPECT_THROW(read_matrix_csv(bad), Error);
}
