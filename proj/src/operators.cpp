#include "focklab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "focklab/fock_core.hpp"
#include "focklab/special.hpp"

namespace focklab {

namespace {

double log_norm_factor(int a, int b, double t) {
  // log sqrt(t^{a+b} a! b!)
  return 0.5 * ((a + b) * std::log(t) + special::log_factorial(a) + special::log_factorial(b));
}

std::vector<double> merged_breakpoints(const std::vector<Harmonic>& modes) {
  std::vector<double> out;
  for (const Harmonic& h : modes) out.insert(out.end(), h.breakpoints.begin(), h.breakpoints.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// sum_j c_j Gamma(a + j) (1/t + gamma)^{-(a + j)}
Complex gamma_moment(const RadialGaussianTerm& term, double a, double t) {
  const Complex lg = std::log(1.0 / t + term.gamma);
  Complex acc = 0.0;
  for (std::size_t j = 0; j < term.poly.size(); ++j) {
    if (term.poly[j] == Complex(0.0)) continue;
    const double aj = a + static_cast<double>(j);
    acc += term.poly[j] * std::exp(std::lgamma(aj) - aj * lg);
  }
  return acc;
}

Eigen::MatrixXcd assemble_harmonic(const std::vector<Harmonic>& modes, const BasisPtr& basis,
                                   const quad::QuadratureScheme& scheme, bool& allClosed) {
  const int n = basis->n();
  const int N = basis->max_degree();
  const double t = basis->t();
  const Eigen::Index d = basis->dim();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(d, d);
  allClosed = true;
  const quad::Rule1D& rule = scheme.radialRule;
  std::vector<double> logr(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) logr[i] = std::log(rule.nodes[i]);

  for (const Harmonic& h : modes) {
    if (n > 1 && h.m != 0) throw Error("toeplitz: angular modes need n = 1");
    if (std::abs(h.m) > N) continue;
    if (!h.closedForm) allClosed = false;
    std::vector<Complex> rho;
    if (!h.closedForm) {
      rho.resize(rule.size());
      for (std::size_t i = 0; i < rule.size(); ++i) rho[i] = h.rho(rule.nodes[i]);
    }
    if (n == 1) {
      for (int alpha = 0; alpha <= N; ++alpha) {
        const int beta = alpha + h.m;
        if (beta < 0 || beta > N) continue;
        const double lnf = log_norm_factor(alpha, beta, t);
        Complex v = 0.0;
        if (h.closedForm) {
          const double a = 0.5 * (alpha + beta) + 1.0;
          for (const auto& term : h.terms) v += gamma_moment(term, a, t);
          v *= std::exp(-lnf) / t;
        } else {
          for (std::size_t i = 0; i < rule.size(); ++i) {
            const double r = rule.nodes[i];
            if (r <= 0.0) continue;
            const double lw = (alpha + beta + 1) * logr[i] - r * r / t - lnf;
            v += rule.weights[i] * std::exp(lw) * rho[i];
          }
          v *= 2.0 / t;
        }
        A(beta, alpha) += v;
      }
    } else {
      std::vector<Complex> diag(static_cast<std::size_t>(N + 1));
      for (int k = 0; k <= N; ++k) {
        const int K = k + n;
        Complex v = 0.0;
        if (h.closedForm) {
          for (const auto& term : h.terms) v += gamma_moment(term, K, t);
          v *= std::exp(-std::lgamma(K) - K * std::log(t));
        } else {
          for (std::size_t i = 0; i < rule.size(); ++i) {
            const double r = rule.nodes[i];
            if (r <= 0.0) continue;
            const double lw = (2 * K - 1) * logr[i] - r * r / t - std::lgamma(K) - K * std::log(t);
            v += rule.weights[i] * std::exp(lw) * rho[i];
          }
          v *= 2.0;
        }
        diag[static_cast<std::size_t>(k)] = v;
      }
      for (Eigen::Index i = 0; i < d; ++i) A(i, i) += diag[static_cast<std::size_t>(basis->degree_of(i))];
    }
  }
  return A;
}

Eigen::MatrixXcd assemble_polar(const Symbol& f, const BasisPtr& basis, const quad::QuadratureScheme& scheme) {
  const int N = basis->max_degree();
  const double t = basis->t();
  const int M = scheme.angularCount;
  const quad::Rule1D& rule = scheme.radialRule;
  std::vector<Complex> roots(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) roots[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * kPi * j / M);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N + 1, N + 1);
  std::vector<Complex> samples(static_cast<std::size_t>(M));
  std::vector<Complex> modes(static_cast<std::size_t>(2 * N + 1));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = rule.nodes[i];
    if (r <= 0.0) continue;
    for (int j = 0; j < M; ++j) samples[static_cast<std::size_t>(j)] = f(Point{r * roots[static_cast<std::size_t>(j)]});
    for (int m = -N; m <= N; ++m) {
      Complex acc = 0.0;
      for (int j = 0; j < M; ++j) {
        // e^{-i m theta_j}
        const int idx = ((-m * j) % M + M) % M;
        acc += samples[static_cast<std::size_t>(j)] * roots[static_cast<std::size_t>(idx)];
      }
      modes[static_cast<std::size_t>(m + N)] = acc / static_cast<double>(M);
    }
    const double lr = std::log(r);
    for (int alpha = 0; alpha <= N; ++alpha) {
      for (int beta = 0; beta <= N; ++beta) {
        const double lw = (alpha + beta + 1) * lr - r * r / t - log_norm_factor(alpha, beta, t);
        A(beta, alpha) += rule.weights[i] * std::exp(lw) * modes[static_cast<std::size_t>(beta - alpha + N)];
      }
    }
  }
  return A * (2.0 / t);
}

Eigen::MatrixXcd assemble_hermite(const Symbol& f, const BasisPtr& basis, int m) {
  const int n = basis->n();
  const double st = std::sqrt(basis->t());
  const quad::Rule1D gh = quad::gauss_hermite(m);
  const Eigen::Index d = basis->dim();
  const std::size_t per = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= per;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(d, d);
  constexpr std::size_t chunk = 2048;
  Eigen::MatrixXcd phi(static_cast<Eigen::Index>(chunk), d);
  Eigen::VectorXcd wf(static_cast<Eigen::Index>(chunk));
  Point z(n);
  for (std::size_t start = 0; start < total; start += chunk) {
    const std::size_t count = std::min(chunk, total - start);
    for (std::size_t p = 0; p < count; ++p) {
      std::size_t rem = start + p;
      double w = 1.0;
      for (int j = 0; j < n; ++j) {
        const std::size_t local = rem % per;
        rem /= per;
        const std::size_t a = local / static_cast<std::size_t>(m), b = local % static_cast<std::size_t>(m);
        z[j] = st * Complex(gh.nodes[a], gh.nodes[b]);
        w *= gh.weights[a] * gh.weights[b] / kPi;
      }
      phi.row(static_cast<Eigen::Index>(p)) = basis->evaluate(z).transpose();
      wf(static_cast<Eigen::Index>(p)) = w * f(z);
    }
    const auto rows = static_cast<Eigen::Index>(count);
    A.noalias() += phi.topRows(rows).adjoint() * (wf.head(rows).asDiagonal() * phi.topRows(rows));
  }
  return A;
}

ToeplitzAssembly assemble_once(const Symbol& f, const BasisPtr& basis, const quad::SchemeOptions& opts) {
  const double bound = f.bound();
  if (!std::isfinite(bound)) throw Error("toeplitz: symbol has no certified bound: " + f.describe());
  const int n = basis->n();
  const int N = basis->max_degree();
  if (auto modes = harmonic_decomposition(f, n)) {
    const quad::QuadratureScheme scheme =
        quad::toeplitz_scheme(basis->t(), n, N, bound, merged_breakpoints(*modes), opts);
    bool closed = true;
    Eigen::MatrixXcd A = assemble_harmonic(*modes, basis, scheme, closed);
    return {OperatorMatrix(basis, std::move(A)), closed ? "closed-form" : "radial-quadrature",
            closed ? 0.0 : scheme.tailBound, 0.0};
  }
  if (n == 1) {
    const quad::QuadratureScheme scheme = quad::toeplitz_scheme(basis->t(), 1, N, bound, f.breakpoints(), opts);
    return {OperatorMatrix(basis, assemble_polar(f, basis, scheme)), "polar-quadrature", scheme.tailBound, 0.0};
  }
  const int m = N + 16 + (opts.panelWidth < 0.5 ? 8 : 0);
  return {OperatorMatrix(basis, assemble_hermite(f, basis, m)), "hermite-quadrature", 0.0, 0.0};
}

}  // namespace

bool symbol_is_real(const Symbol& f) {
  const SymbolNode& nd = f.node();
  auto real = [](Complex c) { return c.imag() == 0.0; };
  switch (nd.kind) {
    case SymbolKind::Constant:
      return real(nd.value);
    case SymbolKind::Gaussian:
      return real(nd.gamma);
    case SymbolKind::PolyGaussian:
      return real(nd.gamma) && std::all_of(nd.coeffs.begin(), nd.coeffs.end(), real);
    case SymbolKind::Radial:
      return nd.profile != RadialProfile::Step || (real(nd.lo) && real(nd.hi));
    case SymbolKind::SmoothSign:
      return true;
    case SymbolKind::Sum:
    case SymbolKind::Product:
      return std::all_of(nd.children.begin(), nd.children.end(), [](const Symbol& c) { return symbol_is_real(c); });
    case SymbolKind::Affine:
    case SymbolKind::Heat:
      return symbol_is_real(nd.children.front());
    default:
      return false;
  }
}

ToeplitzAssembly toeplitz_assemble(const Symbol& f, const BasisPtr& basis, const quad::SchemeOptions& opts) {
  if (f.is_constant()) {
    const Complex c = f(Point(basis->n()));
    return {OperatorMatrix(basis, c * Eigen::MatrixXcd::Identity(basis->dim(), basis->dim())), "identity", 0.0, 0.0};
  }
  ToeplitzAssembly res = assemble_once(f, basis, opts);
  if (opts.estimateResidual && res.method != "closed-form") {
    quad::SchemeOptions fine = opts.refined();
    fine.estimateResidual = false;
    const ToeplitzAssembly ref = assemble_once(f, basis, fine);
    res.residual = (ref.matrix.entries() - res.matrix.entries()).cwiseAbs().maxCoeff();
    if (res.residual > opts.residualTolerance) {
      throw Error("toeplitz: quadrature residual " + std::to_string(res.residual) + " above tolerance for " +
                  f.describe());
    }
  }
  if (symbol_is_real(f)) {
    Eigen::MatrixXcd h = 0.5 * (res.matrix.entries() + res.matrix.entries().adjoint());
    res.matrix = OperatorMatrix(basis, std::move(h));
  }
  return res;
}

OperatorMatrix toeplitz_matrix(const Symbol& f, const BasisPtr& basis, const quad::SchemeOptions& opts) {
  return toeplitz_assemble(f, basis, opts).matrix;
}

// ---------------------------------------------------------------------------
// Berezin

BerezinEvaluator::BerezinEvaluator(OperatorMatrix a) : a_(std::move(a)), norm_(spectral_norm(a_.entries())) {}

BerezinValue BerezinEvaluator::operator()(const Point& z) const {
  const KernelExpansion k = normalized_kernel_expand(a_.basis(), z);
  const double nrm = k.vector.coeffs.norm();
  if (nrm == 0.0) throw Error("berezin: kernel expansion vanished");
  const Eigen::VectorXcd u = k.vector.coeffs / nrm;
  const Complex v = u.dot(a_.entries() * u);
  const double delta = k.truncationError;
  return {v, delta, norm_ * (2.0 * delta + 2.0 * delta * delta)};
}

Complex BerezinEvaluator::checked(const Point& z, double tolerance) const {
  const BerezinValue b = (*this)(z);
  if (b.errorBound > tolerance) {
    throw Error("berezin: kernel truncation error " + std::to_string(b.errorBound) +
                " above tolerance; increase the truncation degree");
  }
  return b.value;
}

BerezinValue berezin(const OperatorMatrix& a, const Point& z) { return BerezinEvaluator(a)(z); }

Complex berezin_checked(const OperatorMatrix& a, const Point& z, double tolerance) {
  return BerezinEvaluator(a).checked(z, tolerance);
}

Symbol berezin_symbol(const OperatorMatrix& a) {
  auto ev = std::make_shared<BerezinEvaluator>(a);
  return Symbol::callable([ev](const Point& z) { return (*ev)(z).value; }, ev->operator_norm(),
                          TagSet{SymbolTag::Bounded}, "berezin");
}

// ---------------------------------------------------------------------------
// Actions

OperatorMatrix shift(const OperatorMatrix& a, const Point& z) {
  const OperatorMatrix w = weyl_matrix(a.basis(), z);
  const OperatorMatrix wm = weyl_matrix(a.basis(), -z);
  return w * a * wm;
}

Symbol heat_kernel(double s, int n) {
  if (!(s > 0.0)) throw Error("heat_kernel: s must be positive");
  return Symbol::gaussian(s).scaled(std::pow(kPi * s, -static_cast<double>(n)));
}

ModuleConvolution module_conv(const Symbol& f, const OperatorMatrix& a) {
  const BasisPtr& basis = a.basis();
  const int n = basis->n();
  const double t = basis->t();
  const auto terms = gaussian_decomposition(f, n);
  if (!terms) {
    throw Error("module_conv: weight must be a finite sum of Gaussian-type terms with real width, got " +
                f.describe());
  }
  const Eigen::Index d = basis->dim();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  double l1 = 0.0;
  int maxNodes = 0;
  for (const GaussianTerm& term : *terms) {
    const int deg = static_cast<int>(term.poly.size()) - 1;
    const int m = basis->max_degree() + deg + 2;
    maxNodes = std::max(maxNodes, m);
    const quad::Rule1D gh = quad::gauss_hermite(m);
    const double kappa = term.gamma + 1.0 / t;
    const double sk = 1.0 / std::sqrt(kappa);
    const Point c = term.center.dim() == 0 ? Point(n) : term.center;
    const Point z0 = (term.gamma / kappa) * c;
    const double constant = std::exp(-term.gamma * c.norm2() / (t * kappa));
    // |P(v)| v^{n-1} e^{-gamma v} integrated radially: ||term||_1.
    {
      const quad::Rule1D lr = quad::composite_legendre(0.0, std::sqrt((60.0 + 4.0 * deg) / term.gamma), {},
                                                       0.25 / std::sqrt(term.gamma), 16);
      double s = 0.0;
      for (std::size_t i = 0; i < lr.size(); ++i) {
        const double r = lr.nodes[i], v = r * r;
        Complex pv = 0.0;
        for (int j = deg; j >= 0; --j) pv = pv * v + term.poly[static_cast<std::size_t>(j)];
        s += lr.weights[i] * std::abs(pv) * std::pow(v, n - 1) * std::exp(-term.gamma * v) * 2.0 * r;
      }
      l1 += std::abs(term.amplitude) * std::pow(kPi, n) / std::tgamma(n) * s;
    }
    const std::size_t per = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= per;
    Eigen::MatrixXcd part = Eigen::MatrixXcd::Zero(d, d);
    Point z(n);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      double w = 1.0;
      for (int j = 0; j < n; ++j) {
        const std::size_t local = rem % per;
        rem /= per;
        const std::size_t p = local / static_cast<std::size_t>(m), q = local % static_cast<std::size_t>(m);
        z[j] = z0[j] + sk * Complex(gh.nodes[p], gh.nodes[q]);
        w *= gh.weights[p] * gh.weights[q] * sk * sk;
      }
      const double v = (z - c).norm2();
      Complex pv = 0.0;
      for (int j = deg; j >= 0; --j) pv = pv * v + term.poly[static_cast<std::size_t>(j)];
      const Eigen::MatrixXcd wz = weyl_matrix(basis, z, true).entries();
      const Eigen::MatrixXcd wmz = weyl_matrix(basis, -z, true).entries();
      part.noalias() += (w * pv) * (wz * a.entries() * wmz);
    }
    acc += (term.amplitude * constant) * part;
  }
  const double lhs = spectral_norm(acc);
  const double rhs = l1 * spectral_norm(a.entries());
  return {OperatorMatrix(basis, std::move(acc)), l1, lhs <= rhs * (1.0 + 1e-10) + 1e-14, maxNodes};
}

}  // namespace focklab

namespace focklab {

OperatorMatrix restrict_to(const OperatorMatrix& a, const BasisPtr& basis) {
  const MultiIndexBasis& big = a.basis_ref();
  if (big.t() != basis->t() || big.n() != basis->n() || big.max_degree() < basis->max_degree()) {
    throw Error("restrict_to: target basis is not a leading block");
  }
  return {basis, a.entries().topLeftCorner(basis->dim(), basis->dim())};
}

OperatorMatrix module_conv_padded(const Symbol& f, const OperatorFactory& a, const BasisPtr& basis, int pad) {
  if (pad < 0) throw Error("module_conv_padded: negative padding");
  const BasisPtr work = MultiIndexBasis::make(basis->t(), basis->n(), basis->max_degree() + pad);
  return restrict_to(module_conv(f, a(work)).matrix, basis);
}

OperatorMatrix rank_one(const TruncatedVector& u, const TruncatedVector& v) {
  require_same_basis(*u.basis, *v.basis, "rank_one");
  return {u.basis, u.coeffs * v.coeffs.adjoint()};
}

OperatorMatrix dilation_conjugate(const OperatorMatrix& a, double lambda) {
  if (!(lambda > 0.0)) throw Error("dilation_conjugate: lambda must be positive");
  return {a.basis()->rescaled(a.basis()->t() * lambda * lambda), a.entries()};
}

OperatorMatrix k_s_matrix(const BasisPtr& basis, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw Error("k_s_matrix: s must lie in (0, 1]");
  Eigen::VectorXcd diag(basis->dim());
  for (Eigen::Index i = 0; i < basis->dim(); ++i) diag(i) = std::pow(s, basis->degree_of(i));
  return {basis, diag.asDiagonal()};
}

// ---------------------------------------------------------------------------
// Integral kernels

KernelFn matrix_kernel(const OperatorMatrix& a) {
  auto m = std::make_shared<OperatorMatrix>(a);
  return [m](const Point& w, const Point& z) {
    const Eigen::VectorXcd kw = normalized_kernel_expand(m->basis(), w).vector.coeffs;
    const Eigen::VectorXcd kz = normalized_kernel_expand(m->basis(), z).vector.coeffs;
    return kz.dot(m->entries() * kw);
  };
}

namespace {

std::vector<Point> planar_grid(int n, double radius, int rings, int angles) {
  std::vector<Point> out;
  Point origin(n);
  out.push_back(origin);
  for (int i = 1; i <= rings; ++i) {
    const double r = radius * i / rings;
    for (int j = 0; j < angles; ++j) {
      const Complex c = std::polar(r, 2.0 * kPi * (j + 0.5 * (i % 2)) / angles);
      for (int k = 0; k < n; ++k) {
        Point p(n);
        p[k] = c;
        out.push_back(p);
      }
    }
  }
  return out;
}

}  // namespace

LocalizationFit localization_fit(const KernelFn& kernel, int n, double t, double radius) {
  const std::vector<Point> grid = planar_grid(n, radius, 6, 8);
  const int bins = 24;
  const double dmax = 2.0 * radius;
  std::vector<double> env(static_cast<std::size_t>(bins), 0.0);
  struct Sample {
    double d, v;
  };
  std::vector<Sample> samples;
  for (const Point& w : grid) {
    for (const Point& z : grid) {
      const double d = (z - w).norm();
      const double v = std::abs(kernel(w, z));
      samples.push_back({d, v});
      const int b = std::min(bins - 1, static_cast<int>(d / dmax * bins));
      env[static_cast<std::size_t>(b)] = std::max(env[static_cast<std::size_t>(b)], v);
    }
  }
  // least squares of log env against log(1 + d) over populated bins
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int b = 0; b < bins; ++b) {
    const double e = env[static_cast<std::size_t>(b)];
    if (!(e > 1e-280)) continue;
    const double x = std::log1p((b + 0.5) * dmax / bins);
    const double y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  LocalizationFit fit;
  fit.samples = static_cast<int>(samples.size());
  if (cnt >= 2) fit.fittedSlope = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  fit.beta = std::min(fit.fittedSlope, 4.0 * n + 4.0);
  for (const Sample& s : samples) fit.C = std::max(fit.C, s.v * std::pow(1.0 + s.d, fit.beta));
  fit.certified = fit.beta > 2.0 * n && std::isfinite(fit.C);
  (void)t;
  return fit;
}

IntegralApplyResult integral_apply(const KernelFn& kernel, const TruncatedVector& v, const IntegralApplyOptions& opts) {
  const BasisPtr& basis = v.basis;
  const int n = basis->n();
  const int N = basis->max_degree();
  const double t = basis->t();
  const double radius = opts.certificateRadius > 0.0 ? opts.certificateRadius : 0.5 * std::sqrt(t * std::max(N, 4));
  LocalizationFit fit = localization_fit(kernel, n, t, radius);
  if (!fit.certified) {
    throw Error("integral_apply: kernel decay not certified (fitted beta " + std::to_string(fit.beta) + ")");
  }
  const int m = opts.nodesPerAxis > 0 ? opts.nodesPerAxis : N + 4;
  const quad::Rule1D gh = quad::gauss_hermite(m);
  const double st = std::sqrt(t);
  const std::size_t per = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= per;
  std::vector<Point> pts;
  std::vector<double> wts;
  pts.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    double w = 1.0;
    Point z(n);
    for (int j = 0; j < n; ++j) {
      const std::size_t local = rem % per;
      rem /= per;
      const std::size_t a = local / static_cast<std::size_t>(m), b = local % static_cast<std::size_t>(m);
      z[j] = st * Complex(gh.nodes[a], gh.nodes[b]);
      w *= gh.weights[a] * gh.weights[b] / kPi;
    }
    pts.push_back(z);
    wts.push_back(w);
  }
  // f(w) e^{|w|^2/2t} at the nodes
  std::vector<Complex> fw(total);
  for (std::size_t p = 0; p < total; ++p) fw[p] = v(pts[p]) * std::exp(pts[p].norm2() / (2.0 * t));
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(basis->dim());
  for (std::size_t q = 0; q < total; ++q) {
    const Point& z = pts[q];
    Complex af = 0.0;
    for (std::size_t p = 0; p < total; ++p) af += wts[p] * fw[p] * kernel(pts[p], z);
    af *= std::exp(z.norm2() / (2.0 * t));
    out += (wts[q] * af) * basis->evaluate(z).conjugate();
  }
  return {TruncatedVector(basis, std::move(out)), fit};
}

// ---------------------------------------------------------------------------
// Norm estimates

namespace {

bool is_scalar_identity(const Eigen::MatrixXcd& m, Complex& c) {
  c = m(0, 0);
  const Eigen::MatrixXcd diff = m - c * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return diff.cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, std::abs(c));
}

}  // namespace

NormEstimate norm_estimate(const OperatorMatrix& a, NormExponent p, const NormSearchOptions& opts) {
  NormEstimate est;
  est.p = p;
  const Eigen::MatrixXcd& m = a.entries();
  if (p == NormExponent::Two) {
    est.lower = est.upper = spectral_norm(m);
    est.method = "exact-singular-value";
    return est;
  }
  Complex c;
  if (is_scalar_identity(m, c)) {
    est.lower = est.upper = std::abs(c);
    est.method = "scalar-identity";
    return est;
  }
  const BasisPtr& basis = a.basis();
  const int n = basis->n();
  const NormExponent q = conjugate(p);
  const FockParams pp(basis->t(), n, p), qq(basis->t(), n, q);

  // upper: weighted entry bound
  std::vector<double> np(static_cast<std::size_t>(basis->dim())), nq(np.size());
  for (Eigen::Index i = 0; i < basis->dim(); ++i) {
    np[static_cast<std::size_t>(i)] = basis_norm(pp, basis->index(i));
    nq[static_cast<std::size_t>(i)] = basis_norm(qq, basis->index(i));
  }
  double upper = 0.0;
  for (Eigen::Index al = 0; al < m.cols(); ++al) {
    double col = 0.0;
    for (Eigen::Index be = 0; be < m.rows(); ++be) col += std::abs(m(be, al)) * np[static_cast<std::size_t>(be)];
    upper += nq[static_cast<std::size_t>(al)] * col;
  }
  upper *= std::pow(2.0, n);

  // lower: witness search with a coarse norm, best witness re-evaluated at default accuracy
  const FpNormOptions coarse{1e-6, 1};
  auto ratio = [&](const Eigen::VectorXcd& x, const FpNormOptions& o) {
    const TruncatedVector vx(basis, x);
    const double den = fp_norm(vx, p, o);
    if (!(den > 0.0)) return 0.0;
    return fp_norm(TruncatedVector(basis, m * x), p, o) / den;
  };
  std::vector<Eigen::VectorXcd> cands;
  const Eigen::Index dim = basis->dim();
  const Eigen::Index stride = std::max<Eigen::Index>(1, dim / 12);
  for (Eigen::Index i = 0; i < dim; i += stride) cands.push_back(Eigen::VectorXcd::Unit(dim, i));
  const double maxR = std::sqrt(basis->t() * basis->max_degree()) * 0.5;
  for (double r : {0.0, 0.5 * maxR, maxR}) {
    for (int k = 0; k < (r == 0.0 ? 1 : 4); ++k) {
      Point z(n);
      z[0] = std::polar(r, 0.5 * kPi * k);
      cands.push_back(normalized_kernel_expand(basis, z).vector.coeffs);
    }
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < opts.randomStarts; ++r) {
    Eigen::VectorXcd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x(i) = Complex(gauss(rng), gauss(rng)) / std::sqrt(1.0 + i);
    cands.push_back(x);
  }
  Eigen::VectorXcd best = cands.front();
  double bestVal = -1.0;
  for (const auto& x : cands) {
    const double v = ratio(x, coarse);
    if (v > bestVal) {
      bestVal = v;
      best = x;
    }
  }
  std::uniform_int_distribution<Eigen::Index> pick(0, dim - 1);
  double step = 0.5 * best.cwiseAbs().maxCoeff();
  for (int s = 0; s < opts.ascentSteps; ++s) {
    Eigen::VectorXcd trial = best;
    const Eigen::Index i = pick(rng);
    trial(i) += step * Complex(gauss(rng), gauss(rng));
    const double v = ratio(trial, coarse);
    if (v > bestVal) {
      bestVal = v;
      best = trial;
    } else {
      step *= 0.7;
    }
  }
  est.lower = ratio(best, FpNormOptions{});
  est.upper = std::max(upper, est.lower);
  est.method = "witness-search/entry-bound";
  return est;
}

// ---------------------------------------------------------------------------
// CSV

void write_matrix_csv(const OperatorMatrix& a, std::ostream& out) {
  const MultiIndexBasis& b = a.basis_ref();
  out << "# focklab-matrix v1\n";
  out << "# t=" << std::setprecision(17) << b.t() << ",n=" << b.n() << ",N=" << b.max_degree()
      << ",ordering=graded-lex\n";
  out << "beta,alpha,re,im\n";
  for (Eigen::Index be = 0; be < a.dim(); ++be)
    for (Eigen::Index al = 0; al < a.dim(); ++al)
      out << be << ',' << al << ',' << a(be, al).real() << ',' << a(be, al).imag() << '\n';
}

OperatorMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# focklab-matrix v1") throw Error("read_matrix_csv: missing format line");
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw Error("read_matrix_csv: missing metadata line");
  double t = 0.0;
  int n = 0, N = -1;
  std::string ordering;
  std::stringstream meta(line.substr(2));
  std::string kv;
  while (std::getline(meta, kv, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("read_matrix_csv: malformed metadata '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "t") {
      t = std::stod(val);
    } else if (key == "n") {
      n = std::stoi(val);
    } else if (key == "N") {
      N = std::stoi(val);
    } else if (key == "ordering") {
      ordering = val;
    } else {
      throw Error("read_matrix_csv: unknown metadata key '" + key + "'");
    }
  }
  if (ordering != "graded-lex") throw Error("read_matrix_csv: unsupported ordering '" + ordering + "'");
  if (N < 0) throw Error("read_matrix_csv: missing N");
  const BasisPtr basis = MultiIndexBasis::make(t, n, N);
  if (!std::getline(in, line) || line != "beta,alpha,re,im") throw Error("read_matrix_csv: missing column header");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis->dim(), basis->dim());
  std::vector<char> seen(static_cast<std::size_t>(basis->dim() * basis->dim()), 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string f0, f1, f2, f3;
    if (!std::getline(row, f0, ',') || !std::getline(row, f1, ',') || !std::getline(row, f2, ',') ||
        !std::getline(row, f3)) {
      throw Error("read_matrix_csv: malformed row '" + line + "'");
    }
    const long be = std::stol(f0), al = std::stol(f1);
    if (be < 0 || al < 0 || be >= basis->dim() || al >= basis->dim()) throw Error("read_matrix_csv: index out of range");
    m(be, al) = Complex(std::stod(f2), std::stod(f3));
    seen[static_cast<std::size_t>(be * basis->dim() + al)] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw Error("read_matrix_csv: missing entries");
  return {basis, std::move(m)};
}

}  // namespace focklab
