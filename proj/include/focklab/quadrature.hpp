#pragma once

#include <vector>

#include "focklab/core_types.hpp"

namespace focklab::quad {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [-1, 1].
Rule1D gauss_legendre(int m);

/// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
Rule1D gauss_hermite(int m);

/// Composite Gauss-Legendre on [a, b]. Panel edges include every
/// breakpoint inside (a, b); panels are then split to width <= maxPanelWidth.
Rule1D composite_legendre(double a, double b, std::vector<double> breakpoints, double maxPanelWidth,
                          int nodesPerPanel);

/// Knobs shared by every polar (radial x angular) rule.
struct SchemeOptions {
  int nodesPerPanel = 16;
  /// Radial panel width in units of sqrt(t).
  double panelWidth = 0.5;
  /// 0 selects 4N + 8.
  int angularCount = 0;
  /// Target for the analytic Gaussian tail outside the cutoff radius.
  double tailTolerance = 1e-15;
  /// Assemble a second time on a refined rule and report the difference.
  bool estimateResidual = false;
  /// Hard failure threshold for the residual when it is estimated.
  double residualTolerance = 1e-9;

  SchemeOptions refined() const {
    SchemeOptions r = *this;
    r.panelWidth *= 0.5;
    r.angularCount = angularCount > 0 ? 2 * angularCount : 0;
    return r;
  }
};

/// Radial x angular quadrature over one complex coordinate. Radial nodes
/// live on [0, R] with weights for dr (the Jacobian r is not included);
/// angles are uniform, theta_j = 2 pi j / angularCount.
struct QuadratureScheme {
  Rule1D radialRule;
  int angularCount = 0;
  double tailBound = 0.0;
  double R = 0.0;
};

/// Scheme for integrals against the Gaussian weight exp(-r^2/t) of products
/// e_alpha conj(e_beta) with |alpha|, |beta| <= maxDegree. R is chosen so
/// that the Gamma(maxDegree + n) tail times symbolBound is below the tail
/// tolerance; breakpoints are radii where the integrand is less smooth.
QuadratureScheme toeplitz_scheme(double t, int n, int maxDegree, double symbolBound,
                                 const std::vector<double>& breakpoints, const SchemeOptions& opts);

/// Uniform angular nodes.
std::vector<double> angular_nodes(int count);

}  // namespace focklab::quad
