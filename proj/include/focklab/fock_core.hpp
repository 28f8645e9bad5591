#pragma once

#include <Eigen/Dense>

#include "focklab/basis.hpp"
#include "focklab/core_types.hpp"

namespace focklab {

/// ||e_k||_{F_t^p} for one complex coordinate. t-independent:
///   p = 1:   2^{k/2} Gamma(k/2 + 1) / sqrt(k!)
///   p = 2:   1
///   p = inf: k^{k/2} e^{-k/2} / sqrt(k!)
double basis_norm_1d(NormExponent p, int k);

/// ||e_alpha||_{F_t^p}; the norms factor over coordinates.
double basis_norm(const FockParams& params, const MultiIndex& alpha);

/// (2k)^{k/2} Gamma(k/2 + 1) e^{-k/2} / k!, the closed form of
/// ||e_k||_1 ||e_k||_inf.
double basis_norm_product_formula(int k);

/// K_z(w) = exp(w . conj(z) / t).
Complex kernel_eval(const FockParams& params, const Point& z, const Point& w);

/// k_z(w) = exp(w . conj(z) / t - |z|^2 / 2t).
Complex normalized_kernel_eval(const FockParams& params, const Point& z, const Point& w);

struct KernelExpansion {
  TruncatedVector vector;
  /// F^2 norm of the discarded part of the series.
  double truncationError = 0.0;
};

/// K_z truncated to the basis: coefficient alpha is conj(e_alpha(z)).
KernelExpansion kernel_expand(const BasisPtr& basis, const Point& z);

/// k_z truncated to the basis: coefficient alpha is conj(e_alpha(z)) e^{-|z|^2/2t}.
KernelExpansion normalized_kernel_expand(const BasisPtr& basis, const Point& z);

/// One-coordinate Weyl matrix W[m, k] = <W_z e_k, e_m>, 0 <= m, k <= maxDegree,
/// from the generalized Laguerre closed form with xi = conj(z)/sqrt(t):
///   m >= k: sqrt(k!/m!) xi^{m-k} e^{-|xi|^2/2} L_k^{(m-k)}(|xi|^2)
///   m <  k: sqrt(m!/k!) (-conj(xi))^{k-m} e^{-|xi|^2/2} L_m^{(k-m)}(|xi|^2)
/// With unweighted = true the factor e^{-|xi|^2/2} is dropped.
Eigen::MatrixXcd weyl_matrix_1d(double t, int maxDegree, Complex z, bool unweighted = false);

/// Weyl operator W_z g(w) = k_z(w) g(w - z) on the truncated basis. For
/// n > 1 entry (beta, alpha) is the product over coordinates j of the 1-D
/// entries W_j[beta_j, alpha_j] at z_j. unweighted = true drops e^{-|z|^2/2t}.
OperatorMatrix weyl_matrix(const BasisPtr& basis, const Point& z, bool unweighted = false);

struct WeylQuadrature {
  OperatorMatrix matrix;
  /// Difference between two Gauss-Hermite resolutions.
  double errorEstimate = 0.0;
  int nodes = 0;
};

/// Weyl matrix by tensor Gauss-Hermite quadrature of
/// <W_z e_alpha, e_beta> (n = 1 only). nodes = 0 picks a default.
WeylQuadrature weyl_matrix_quadrature(const BasisPtr& basis, const Point& z, int nodes = 0);

/// Closed-form Weyl matrix, cross-checked entrywise against quadrature;
/// throws when they disagree by more than tolerance (n = 1 only).
OperatorMatrix weyl_matrix_checked(const BasisPtr& basis, const Point& z, double tolerance = 1e-9);

/// exp(-i Im(z . conj(w)) / t), the scalar in W_z W_w = phase * W_{z+w}.
Complex weyl_composition_phase(double t, const Point& z, const Point& w);

struct FpNormOptions {
  /// Relative agreement required between successive refinements.
  double tolerance = 1e-10;
  int maxRefinements = 4;
};

struct FpNormResult {
  double value = 0.0;
  /// Certified bound on the contribution outside the cutoff radius.
  double tailBound = 0.0;
  /// Difference between the last two refinement levels.
  double errorEstimate = 0.0;
  double R = 0.0;
  int radialNodes = 0;
  int angularNodes = 0;
};

/// ||v||_{F_t^p}. p = 2 is exact from coefficients; p = 1 uses polar
/// Gauss-Legendre x uniform angles with an incomplete-gamma tail; p = inf is
/// a polar grid supremum, locally polished, with an analytic tail bound.
/// Throws when the tail cannot be certified; resolution and the difference
/// between the last two refinements are reported.
FpNormResult fp_norm_detailed(const TruncatedVector& v, NormExponent p, const FpNormOptions& opts = {});

double fp_norm(const TruncatedVector& v, NormExponent p, const FpNormOptions& opts = {});

}  // namespace focklab
