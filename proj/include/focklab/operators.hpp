#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "focklab/basis.hpp"
#include "focklab/core_types.hpp"
#include "focklab/quadrature.hpp"
#include "focklab/symbols.hpp"

namespace focklab {

// ---------------------------------------------------------------------------
// Toeplitz assembly

struct ToeplitzAssembly {
  OperatorMatrix matrix;
  /// "identity", "closed-form", "radial-quadrature", "polar-quadrature" or
  /// "hermite-quadrature".
  std::string method;
  double tailBound = 0.0;
  /// Max entry difference against a refined rule (0 unless requested).
  double residual = 0.0;
};

/// T_f on the truncation, entries <f e_alpha, e_beta>. Centered symbols with
/// a harmonic decomposition use one radial integral per angular mode (exact
/// Gamma integrals for Gaussian-type modes); other n = 1 symbols use a polar
/// rule with a DFT in angle, n > 1 a tensor Gauss-Hermite rule. Real symbols
/// give symmetrized (Hermitian) matrices. Throws when sup|f| is not finite or
/// when a requested residual exceeds opts.residualTolerance.
ToeplitzAssembly toeplitz_assemble(const Symbol& f, const BasisPtr& basis, const quad::SchemeOptions& opts = {});
OperatorMatrix toeplitz_matrix(const Symbol& f, const BasisPtr& basis, const quad::SchemeOptions& opts = {});

/// Structural test that f takes real values.
bool symbol_is_real(const Symbol& f);

// ---------------------------------------------------------------------------
// Berezin transform

struct BerezinValue {
  Complex value{0.0};
  /// F^2 norm of the discarded tail of the normalized kernel.
  double kernelTruncation = 0.0;
  /// ||A||_2 (2 delta + 2 delta^2) with delta the kernel truncation.
  double errorBound = 0.0;
};

/// <A k_z, k_z> with k_z truncated to the basis and renormalized to unit
/// F^2 norm, so the identity maps to 1 exactly.
class BerezinEvaluator {
 public:
  explicit BerezinEvaluator(OperatorMatrix a);
  BerezinValue operator()(const Point& z) const;
  /// Throws when errorBound exceeds tolerance.
  Complex checked(const Point& z, double tolerance) const;
  const OperatorMatrix& matrix() const { return a_; }
  double operator_norm() const { return norm_; }

 private:
  OperatorMatrix a_;
  double norm_;
};

BerezinValue berezin(const OperatorMatrix& a, const Point& z);
Complex berezin_checked(const OperatorMatrix& a, const Point& z, double tolerance);

/// z -> <A k_z, k_z> as a symbol with bound ||A||_2.
Symbol berezin_symbol(const OperatorMatrix& a);

// ---------------------------------------------------------------------------
// Group actions and elementary operators

/// W_z A W_{-z}. Truncation error concentrates in the rows and columns of
/// highest degree, so comparisons use the half-degree block.
OperatorMatrix shift(const OperatorMatrix& a, const Point& z);

/// g_s(z) = (pi s)^{-n} exp(-|z|^2 / s).
Symbol heat_kernel(double s, int n);

struct ModuleConvolution {
  OperatorMatrix matrix;
  /// Upper bound for ||f||_{L^1} from the Gaussian-type terms.
  double l1Bound = 0.0;
  /// ||f * A||_2 <= ||f||_1 ||A||_2 on the truncation.
  bool normBoundHolds = false;
  int nodesPerAxis = 0;
};

/// f * A = int f(z) W_z A W_{-z} dz for Gaussian-type weights f (finite sums
/// of amp P(|z - c|^2) exp(-gamma |z - c|^2), gamma > 0). Each term is
/// integrated by tensor Gauss-Hermite matched to the combined Gaussian
/// exp(-gamma |z - c|^2 - |z|^2 / t); on the truncation the integrand is
/// polynomial, so the rule is exact. Other weights are rejected.
ModuleConvolution module_conv(const Symbol& f, const OperatorMatrix& a);

/// Builds an operator on a given truncation (e.g. a Toeplitz assembly).
using OperatorFactory = std::function<OperatorMatrix(const BasisPtr&)>;

/// module_conv on a working basis of degree N + pad, restricted to the leading
/// block of `basis`. Conjugating a truncated matrix by Weyl operators loses
/// mass across the cutoff, so the padding keeps the returned block accurate.
OperatorMatrix module_conv_padded(const Symbol& f, const OperatorFactory& a, const BasisPtr& basis, int pad);

/// Leading block of a on the smaller basis (same t and n, lower degree).
OperatorMatrix restrict_to(const OperatorMatrix& a, const BasisPtr& basis);

/// (u (x) v) g = <g, v> u.
OperatorMatrix rank_one(const TruncatedVector& u, const TruncatedVector& v);

/// C_{1/lambda} A C_lambda: the same entries read on the basis at scale
/// t lambda^2.
OperatorMatrix dilation_conjugate(const OperatorMatrix& a, double lambda);

/// K_s g(z) = g(s z): diagonal s^{|alpha|}.
OperatorMatrix k_s_matrix(const BasisPtr& basis, double s);

// ---------------------------------------------------------------------------
// Integral kernels

/// (w, z) -> <A k_w, k_z>
using KernelFn = std::function<Complex(const Point& w, const Point& z)>;

KernelFn matrix_kernel(const OperatorMatrix& a);

struct LocalizationFit {
  /// |kernel(w, z)| <= C / (1 + |z - w|)^beta on the sample grid.
  double C = 0.0;
  double beta = 0.0;
  /// Least-squares slope of the log envelope before capping.
  double fittedSlope = 0.0;
  /// beta > 2n
  bool certified = false;
  int samples = 0;
};

/// Samples the kernel on a grid of pairs with |z|, |w| <= radius, fits the
/// decay of the envelope in |z - w| and records a (C, beta) that holds on
/// every sample. beta is capped at 4n + 4.
LocalizationFit localization_fit(const KernelFn& kernel, int n, double t, double radius);

struct IntegralApplyOptions {
  /// Gauss-Hermite nodes per real axis; 0 picks N + 4.
  int nodesPerAxis = 0;
  /// Grid radius for the decay certificate; 0 picks sqrt(t N) / 2.
  double certificateRadius = 0.0;
};

struct IntegralApplyResult {
  TruncatedVector vector;
  LocalizationFit fit;
};

/// Af(z) = int f(w) <A k_w, k_z> e^{(|w|^2 + |z|^2)/2t} dmu_t(w), projected
/// on the basis. Exact for kernels of truncated matrices when the node count
/// exceeds N. Throws when the decay certificate fails.
IntegralApplyResult integral_apply(const KernelFn& kernel, const TruncatedVector& v,
                                   const IntegralApplyOptions& opts = {});

// ---------------------------------------------------------------------------
// Norm estimates

struct NormEstimate {
  NormExponent p = NormExponent::Two;
  double lower = 0.0;
  double upper = 0.0;
  std::string method;
};

struct NormSearchOptions {
  std::uint64_t seed = 1;
  int randomStarts = 4;
  int ascentSteps = 8;
};

/// p = 2: largest singular value (lower = upper). p in {1, inf}: lower from
/// the best witness among basis vectors, normalized kernels and random
/// vectors improved by random coordinate ascent; upper from
/// 2^n sum_alpha ||e_alpha||_q sum_beta |A_{beta alpha}| ||e_beta||_p
/// (|c| for c Id).
NormEstimate norm_estimate(const OperatorMatrix& a, NormExponent p, const NormSearchOptions& opts = {});

// ---------------------------------------------------------------------------
// Text serialization

/// Header lines "# focklab-matrix v1" and "# t=...,n=...,N=...,ordering=graded-lex",
/// then "beta,alpha,re,im" rows for every entry.
void write_matrix_csv(const OperatorMatrix& a, std::ostream& out);
OperatorMatrix read_matrix_csv(std::istream& in);

}  // namespace focklab
