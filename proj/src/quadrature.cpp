#include "focklab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "focklab/special.hpp"

namespace focklab::quad {

Rule1D gauss_legendre(int m) {
  if (m < 1) throw Error("gauss_legendre: need at least one node");
  Rule1D rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = m * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(m - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  return rule;
}

namespace {

// Orthonormal Hermite polynomials for exp(-x^2): returns (p_m(x), p_{m-1}(x))
// and accumulates sum_{k<m} p_k(x)^2.
void hermite_orthonormal(int m, double x, double& pm, double& pm1, double& christoffel) {
  double p0 = std::pow(kPi, -0.25);
  double p1 = std::sqrt(2.0) * x * p0;
  christoffel = p0 * p0;
  if (m == 1) {
    pm = p1;
    pm1 = p0;
    return;
  }
  christoffel += p1 * p1;
  for (int k = 1; k < m - 1; ++k) {
    const double p2 = std::sqrt(2.0 / (k + 1.0)) * x * p1 - std::sqrt(k / (k + 1.0)) * p0;
    p0 = p1;
    p1 = p2;
    christoffel += p1 * p1;
  }
  pm1 = p1;
  pm = std::sqrt(2.0 / m) * x * p1 - std::sqrt((m - 1.0) / m) * p0;
}

}  // namespace

Rule1D gauss_hermite(int m) {
  if (m < 1) throw Error("gauss_hermite: need at least one node");
  // Golub-Welsch for starting values, then Newton on the orthonormal
  // polynomial and Christoffel weights.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    jac(k, k - 1) = jac(k - 1, k) = std::sqrt(k / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  Rule1D rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double x = es.eigenvalues()(i);
    double pm = 0.0, pm1 = 0.0, ch = 0.0;
    for (int iter = 0; iter < 8; ++iter) {
      hermite_orthonormal(m, x, pm, pm1, ch);
      const double dp = std::sqrt(2.0 * m) * pm1;
      const double dx = pm / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    hermite_orthonormal(m, x, pm, pm1, ch);
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / ch;
  }
  // Exact symmetry.
  for (int i = 0; i < m / 2; ++i) {
    const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(m - 1 - i);
    const double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
    const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
    rule.nodes[a] = -x;
    rule.nodes[b] = x;
    rule.weights[a] = rule.weights[b] = w;
  }
  if (m % 2 == 1) rule.nodes[static_cast<std::size_t>(m / 2)] = 0.0;
  return rule;
}

Rule1D composite_legendre(double a, double b, std::vector<double> breakpoints, double maxPanelWidth,
                          int nodesPerPanel) {
  if (!(b > a)) throw Error("composite_legendre: empty interval");
  if (!(maxPanelWidth > 0.0)) throw Error("composite_legendre: panel width must be positive");
  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<double> edges;
  for (double x : breakpoints) {
    if (x < a || x > b) continue;
    if (!edges.empty() && x - edges.back() < 1e-12) continue;
    edges.push_back(x);
  }
  const Rule1D base = gauss_legendre(nodesPerPanel);
  Rule1D out;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double lo = edges[e], hi = edges[e + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / maxPanelWidth)));
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = lo + (p + 0.5) * h;
      for (std::size_t i = 0; i < base.size(); ++i) {
        out.nodes.push_back(c + 0.5 * h * base.nodes[i]);
        out.weights.push_back(0.5 * h * base.weights[i]);
      }
    }
  }
  return out;
}

QuadratureScheme toeplitz_scheme(double t, int n, int maxDegree, double symbolBound,
                                 const std::vector<double>& breakpoints, const SchemeOptions& opts) {
  const double bound = std::max(symbolBound, 1e-300);
  const double q = std::min(0.5, opts.tailTolerance / bound);
  // |z|^2 / t of the weighted products is Gamma(|alpha| + n)-distributed.
  const double shape = static_cast<double>(maxDegree + n);
  const double u = special::gamma_q_inv(shape, q);
  QuadratureScheme s;
  s.R = std::sqrt(u * t) + std::sqrt(t);
  s.tailBound = bound * special::gamma_q(shape, s.R * s.R / t);
  s.radialRule = composite_legendre(0.0, s.R, breakpoints, opts.panelWidth * std::sqrt(t), opts.nodesPerPanel);
  s.angularCount = opts.angularCount > 0 ? opts.angularCount : 4 * maxDegree + 8;
  return s;
}

std::vector<double> angular_nodes(int count) {
  std::vector<double> th(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) th[static_cast<std::size_t>(j)] = 2.0 * kPi * j / count;
  return th;
}

}  // namespace focklab::quad
