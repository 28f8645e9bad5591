#include <gtest/gtest.h>

#include <cmath>

#include "focklab/fock_core.hpp"
#include "generators.hpp"

using namespace focklab;
using focklab::testing::Gen;

namespace {

/// (1/t) int_0^inf r^{k+1} e^{-r^2/2t} dr / sqrt(t^k k!) by composite Simpson.
double l1_norm_oracle(int k, double t) {
  const double R = std::sqrt(t) * (12.0 + std::sqrt(double(k)) * 2.0);
  const int m = 40000;
  const double h = R / m;
  auto g = [&](double r) {
    return std::exp((k + 1) * std::log(std::max(r, 1e-300)) - r * r / (2.0 * t) - 0.5 * (k * std::log(t) + std::lgamma(k + 1.0)));
  };
  double s = g(0.0) + g(R);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return s * h / 3.0 / t;
}

/// max_r r^k e^{-r^2/2t} / sqrt(t^k k!) by golden-section search.
double linf_norm_oracle(int k, double t) {
  if (k == 0) return 1.0;
  auto g = [&](double r) { return k * std::log(r) - r * r / (2.0 * t) - 0.5 * (k * std::log(t) + std::lgamma(k + 1.0)); };
  double a = 1e-6, b = 4.0 * std::sqrt(t * (k + 1));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    (g(c) > g(d) ? b : a) = (g(c) > g(d) ? d : c);
  }
  return std::exp(g(0.5 * (a + b)));
}

/// <W_z e_k, e_m> from the Taylor coefficients of k_z(w) e_k(w - z) in w.
Complex weyl_entry_oracle(double t, Complex z, int m, int k) {
  long double re = 0.0L, im = 0.0L;
  for (int i = 0; i <= std::min(k, m); ++i) {
    const int j = m - i;
    const std::complex<long double> term =
        std::exp(std::lgamma(k + 1.0L) - std::lgamma(i + 1.0L) - std::lgamma(k - i + 1.0L) - std::lgamma(j + 1.0L)) *
        std::pow(std::complex<long double>(-z), k - i) * std::pow(std::complex<long double>(std::conj(z)) / (long double)t, j);
    re += term.real();
    im += term.imag();
  }
  const long double scale = std::exp(0.5L * (m * std::log((long double)t) + std::lgamma(m + 1.0L)) -
                                     0.5L * (k * std::log((long double)t) + std::lgamma(k + 1.0L)) -
                                     std::norm(z) / (2.0L * t));
  return Complex(double(re * scale), double(im * scale));
}

}  // namespace

TEST(BasisNorms, FrozenValuesAtDegreeTwo) {
  EXPECT_NEAR(basis_norm_1d(NormExponent::One, 2), 1.4142135623730951, 1e-15);
  EXPECT_NEAR(basis_norm_1d(NormExponent::Infinity, 2), 0.52026009502288890, 1e-15);
  EXPECT_NEAR(basis_norm_product_formula(2), 0.73575888234288464, 1e-15);
  EXPECT_DOUBLE_EQ(basis_norm_1d(NormExponent::Two, 7), 1.0);
}

TEST(BasisNorms, ClosedFormsMatchRadialOracle) {
  for (int k = 0; k <= 60; ++k) {
    EXPECT_NEAR(basis_norm_1d(NormExponent::One, k), l1_norm_oracle(k, 1.0), 1e-10 * l1_norm_oracle(k, 1.0)) << k;
    EXPECT_NEAR(basis_norm_1d(NormExponent::Infinity, k), linf_norm_oracle(k, 1.0), 1e-10) << k;
  }
}

TEST(BasisNorms, ClosedFormsAreScaleFree) {
  for (double t : {0.3, 2.5})
    for (int k : {0, 3, 11}) {
      EXPECT_NEAR(basis_norm_1d(NormExponent::One, k), l1_norm_oracle(k, t), 1e-10 * l1_norm_oracle(k, t));
      EXPECT_NEAR(basis_norm_1d(NormExponent::Infinity, k), linf_norm_oracle(k, t), 1e-10);
    }
}

TEST(BasisNorms, ProductBoundedByOneAndTendsToInverseSqrtTwo) {
  EXPECT_DOUBLE_EQ(basis_norm_product_formula(0), 1.0);
  for (int k = 1; k <= 200; ++k) {
    const double p = basis_norm_product_formula(k);
    EXPECT_LT(p, 1.0);
    EXPECT_NEAR(p, basis_norm_1d(NormExponent::One, k) * basis_norm_1d(NormExponent::Infinity, k), 1e-13);
  }
  EXPECT_NEAR(basis_norm_product_formula(60), 0.70808949254266313, 1e-13);
  EXPECT_LT(std::abs(basis_norm_product_formula(60) - 1.0 / std::sqrt(2.0)), 1e-3);
  EXPECT_LT(std::abs(basis_norm_product_formula(2000) - 1.0 / std::sqrt(2.0)), 1e-4);
}

TEST(BasisNorms, ProductFactorsOverCoordinates) {
  const FockParams p(1.0, 2, NormExponent::One);
  EXPECT_NEAR(basis_norm(p, MultiIndex{2, 3, 0, 0}),
              basis_norm_1d(NormExponent::One, 2) * basis_norm_1d(NormExponent::One, 3), 1e-14);
}

TEST(Basis, GradedLexicographicOrder) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 2, 2);
  ASSERT_EQ(b->dim(), 6);
  EXPECT_EQ(b->index(3), (MultiIndex{2, 0, 0, 0}));
  EXPECT_EQ(b->index(4), (MultiIndex{1, 1, 0, 0}));
  EXPECT_EQ(b->index(5), (MultiIndex{0, 2, 0, 0}));
  EXPECT_EQ(b->position(MultiIndex{0, 1, 0, 0}), 2);
  EXPECT_EQ(b->position(MultiIndex{3, 0, 0, 0}), -1);
  EXPECT_EQ(b->block_size(1), 3);
}

TEST(Basis, RejectsBadParameters) {
  EXPECT_THROW(MultiIndexBasis(0.0, 1, 4), Error);
  EXPECT_THROW(MultiIndexBasis(1.0, 0, 4), Error);
  EXPECT_THROW(FockParams(-1.0, 1), Error);
}

TEST(FpNorm, BasisVectorMatchesClosedForms) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 8);
  TruncatedVector e2(b);
  e2.coeffs(2) = 1.0;
  EXPECT_NEAR(fp_norm(e2, NormExponent::One), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(fp_norm(e2, NormExponent::Infinity), 0.52026009502288890, 1e-9);
  EXPECT_DOUBLE_EQ(fp_norm(e2, NormExponent::Two), 1.0);
}

TEST(Basis, OrthonormalityByPolarQuadrature) {
  // (1/(pi t)) int e_alpha conj(e_beta) e^{-|z|^2/t} dA on a polar Simpson x uniform-angle grid.
  const double t = 0.8;
  const BasisPtr b = MultiIndexBasis::make(t, 1, 10);
  const int radial = 4000, angles = 32;
  const double R = 9.0 * std::sqrt(t), h = R / radial;
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(b->dim(), b->dim());
  for (int i = 1; i <= radial; ++i) {
    const double r = i * h;
    const double w = (i == radial ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3.0 * r * std::exp(-r * r / t) * 2.0 / (t * angles);
    for (int j = 0; j < angles; ++j) {
      const Eigen::VectorXcd e = b->evaluate(Point{std::polar(r, 2.0 * kPi * j / angles)});
      gram += w * e * e.adjoint();
    }
  }
  EXPECT_LT((gram - Eigen::MatrixXcd::Identity(b->dim(), b->dim())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FpNorm, InclusionOrderingOfNorms) {
  // ||f||_inf <= ||f||_2 <= ||f||_1 on Fock spaces.
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 10);
  Gen gen(11);
  for (int trial = 0; trial < 5; ++trial) {
    const TruncatedVector v = gen.vector(b);
    const double two = fp_norm(v, NormExponent::Two);
    EXPECT_NEAR(two, v.coeffs.norm(), 1e-14);
    EXPECT_LE(fp_norm(v, NormExponent::Infinity), two * (1.0 + 1e-9));
    EXPECT_LE(two, fp_norm(v, NormExponent::One) * (1.0 + 1e-9));
  }
}

TEST(Kernels, FrozenNormAndTruncation) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 40);
  const KernelExpansion k = kernel_expand(b, Point{1.0});
  EXPECT_NEAR(std::sqrt(k.vector.coeffs.squaredNorm() + k.truncationError * k.truncationError), 1.6487212707001281,
              1e-14);
  const KernelExpansion k0 = kernel_expand(MultiIndexBasis::make(1.0, 1, 0), Point{1.0});
  EXPECT_NEAR(k0.truncationError * k0.truncationError, 1.7182818284590452, 1e-14);
}

TEST(Kernels, ReproducingPropertyOnPolynomials) {
  Gen gen(3);
  for (int n : {1, 2}) {
    const BasisPtr b = MultiIndexBasis::make(0.7, n, 8);
    for (int trial = 0; trial < 20; ++trial) {
      const TruncatedVector f = gen.vector(b);
      const Point z = gen.point(n, 2.0);
      const Complex pairing = kernel_expand(b, z).vector.coeffs.dot(f.coeffs);
      EXPECT_LT(std::abs(pairing - f(z)), 1e-12 * std::max(1.0, std::abs(f(z))));
    }
  }
}

TEST(Kernels, NormalizedKernelHasUnitNormInEveryFp) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 48);
  Gen gen(5);
  for (int trial = 0; trial < 4; ++trial) {
    const KernelExpansion k = normalized_kernel_expand(b, gen.point(1, 1.5));
    for (NormExponent p : {NormExponent::One, NormExponent::Two, NormExponent::Infinity})
      EXPECT_NEAR(fp_norm(k.vector, p), 1.0, 1e-7);
  }
}

TEST(Weyl, ClosedFormMatchesTaylorOracle) {
  Gen gen(17);
  for (double t : {1.0, 0.5}) {
    const BasisPtr b = MultiIndexBasis::make(t, 1, 14);
    for (int trial = 0; trial < 6; ++trial) {
      const Point z = gen.point(1, 2.0);
      const OperatorMatrix w = weyl_matrix(b, z);
      for (int m = 0; m <= 14; ++m)
        for (int k = 0; k <= 14; ++k) EXPECT_LT(std::abs(w(m, k) - weyl_entry_oracle(t, z[0], m, k)), 1e-11) << m << "," << k;
    }
  }
}

TEST(Weyl, CornerEntryIsGaussian) {
  Gen gen(19);
  const BasisPtr b = MultiIndexBasis::make(1.3, 2, 4);
  for (int trial = 0; trial < 10; ++trial) {
    const Point z = gen.point(2, 3.0);
    EXPECT_NEAR(weyl_matrix(b, z)(0, 0).real(), std::exp(-z.norm2() / 2.6), 1e-14);
  }
}

TEST(Weyl, CompositionPhaseProperty) {
  Gen gen(23);
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 32);
  for (int trial = 0; trial < 25; ++trial) {
    const Point z = gen.point(1, 2.0), w = gen.point(1, 2.0);
    const Complex ratio = (weyl_matrix(b, z) * weyl_matrix(b, w))(0, 0) / weyl_matrix(b, z + w)(0, 0);
    EXPECT_NEAR(std::abs(ratio), 1.0, 1e-10);
    EXPECT_LT(std::abs(ratio - weyl_composition_phase(1.0, z, w)), 1e-10);
  }
}

TEST(Weyl, TensorStructureForTwoCoordinates) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 2, 6);
  const Point z{Complex(0.4, -0.2), Complex(-0.3, 0.5)};
  const OperatorMatrix w = weyl_matrix(b, z);
  const Eigen::MatrixXcd w0 = weyl_matrix_1d(1.0, 6, z[0]), w1 = weyl_matrix_1d(1.0, 6, z[1]);
  for (Eigen::Index i = 0; i < b->dim(); ++i)
    for (Eigen::Index j = 0; j < b->dim(); ++j) {
      const MultiIndex& bi = b->index(i);
      const MultiIndex& aj = b->index(j);
      EXPECT_LT(std::abs(w(i, j) - w0(bi[0], aj[0]) * w1(bi[1], aj[1])), 1e-15);
    }
}

TEST(Weyl, InverseDefectShrinksWithTruncation) {
  const Point z{Complex(1.2, 0.9)};
  double prev = 1e9;
  for (int N : {16, 32, 64}) {
    const BasisPtr b = MultiIndexBasis::make(1.0, 1, N);
    const Eigen::MatrixXcd m = (weyl_matrix(b, z) * weyl_matrix(b, -z)).block(8);
    const double err = spectral_norm(m - Eigen::MatrixXcd::Identity(m.rows(), m.cols()));
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(Weyl, IsometryInEveryFp) {
  Gen gen(29);
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 32);
  for (int trial = 0; trial < 2; ++trial) {
    const TruncatedVector v = gen.vector(b, 4);
    const TruncatedVector wv = weyl_matrix(b, gen.point(1, 1.0)).apply(v);
    for (NormExponent p : {NormExponent::One, NormExponent::Two, NormExponent::Infinity})
      EXPECT_NEAR(fp_norm(wv, p), fp_norm(v, p), 1e-6 * fp_norm(v, p));
  }
}

TEST(Weyl, QuadratureAgreesWithClosedForm) {
  const BasisPtr b = MultiIndexBasis::make(1.0, 1, 12);
  const Point z{Complex(0.8, -1.1)};
  const WeylQuadrature q = weyl_matrix_quadrature(b, z);
  EXPECT_LT((q.matrix.entries() - weyl_matrix(b, z).entries()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NO_THROW(weyl_matrix_checked(b, z));
}
