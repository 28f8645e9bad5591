#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/bessel.hpp>

#include "focklab/quadrature.hpp"
#include "focklab/special.hpp"
#include "focklab/symbols.hpp"

namespace focklab {

namespace {

bool centered(const SymbolNode& nd) {
  if (nd.center.dim() == 0) return true;
  for (int i = 0; i < nd.center.dim(); ++i)
    if (nd.center[i] != Complex(0.0)) return false;
  return true;
}

Point affine_image(const SymbolNode& nd, const Point& z) {
  Point w = z;
  if (nd.center.dim() != 0) w -= nd.center;
  return (nd.flip * nd.scale) * w;
}

using Poly = std::vector<Complex>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, Complex(0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Complex poly_eval(const Poly& p, double v) {
  Complex s = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * v + *it;
  return s;
}

// Heat transform of sum_j c_j v^j e^{-gamma v} (v = |z|^2) in C^n is
// P(v) e^{-gamma' v} with gamma' = gamma / (1 + gamma s). Uses
// v^j e^{-gamma v} = (-d/dgamma)^j e^{-gamma v} and the Taylor series of
// (1 + gamma s)^{-n} exp(-v gamma / (1 + gamma s)) in gamma.
std::pair<Poly, Complex> heat_poly_gaussian(const Poly& c, Complex gamma, double s, int n) {
  const std::size_t J = c.size() - 1;
  const Complex u = 1.0 + gamma * s;
  if (std::abs(u) == 0.0) throw Error("heat transform: 1 + gamma s vanishes");
  std::vector<Complex> q(J + 1);
  for (std::size_t k = 0; k <= J; ++k) q[k] = std::pow(-s / u, static_cast<double>(k)) / u;
  // q^n truncated at order J
  std::vector<Complex> qn(J + 1, Complex(0.0));
  qn[0] = 1.0;
  for (int p = 0; p < n; ++p) {
    std::vector<Complex> next(J + 1, Complex(0.0));
    for (std::size_t i = 0; i <= J; ++i)
      for (std::size_t k = 0; i + k <= J; ++k) next[i + k] += qn[i] * q[k];
    qn = next;
  }
  // b_k(v): coefficients of exp(v sum_{k>=1} (q_k / s) eps^k), polynomials in v.
  std::vector<Poly> b(J + 1);
  b[0] = {Complex(1.0)};
  for (std::size_t k = 1; k <= J; ++k) {
    Poly acc(k + 1, Complex(0.0));
    for (std::size_t j = 1; j <= k; ++j) {
      const Complex f = static_cast<double>(j) * q[j] / s;
      const Poly& prev = b[k - j];
      for (std::size_t i = 0; i < prev.size(); ++i) acc[i + 1] += f * prev[i];
    }
    for (auto& a : acc) a /= static_cast<double>(k);
    b[k] = acc;
  }
  Poly out(J + 1, Complex(0.0));
  double fact = 1.0;
  for (std::size_t j = 0; j <= J; ++j) {
    if (j > 0) fact *= static_cast<double>(j);
    if (c[j] == Complex(0.0)) continue;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i <= j; ++i) {
      const Poly& bi = b[i];
      for (std::size_t d = 0; d < bi.size(); ++d) out[d] += c[j] * sign * fact * qn[j - i] * bi[d];
    }
  }
  return {out, gamma / u};
}

// e^{-x} I_m(x)
double scaled_bessel_i(int m, double x) {
  m = std::abs(m);
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  if (x < 600.0) return boost::math::cyl_bessel_i(m, x) * std::exp(-x);
  const double mu = 4.0 * m * m;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * kPi * x);
}

double gaussian_cutoff(double s, double bound, double tol) {
  const double ratio = std::max(bound, 1e-300) / tol;
  return std::sqrt(s * std::max(std::log(std::max(ratio, 1.0)) + std::log(10.0), 1.0));
}

// H_m(rho) = (2/s) int rho_m(r) r e^{-(r-rho)^2/s} e^{-2 r rho/s} I_m(2 r rho / s) dr,
// the m-th angular mode of g_s * (e^{i m theta} rho_m(r)) at radius rho.
Complex radial_heat_mode(const std::function<Complex(double)>& rho, int m, double s, double radius,
                         const std::vector<double>& breaks, double L, double width, int perPanel) {
  const double a = std::max(0.0, radius - L), b = radius + L;
  std::vector<double> bp = breaks;
  bp.push_back(radius);
  const quad::Rule1D rule = quad::composite_legendre(a, b, bp, width, perPanel);
  Complex acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = rule.nodes[i];
    const double x = 2.0 * r * radius / s;
    const double w = (2.0 / s) * r * std::exp(-(r - radius) * (r - radius) / s) * scaled_bessel_i(m, x);
    if (w == 0.0) continue;
    acc += rule.weights[i] * w * rho(r);
  }
  return acc;
}

struct Accum {
  Complex value{0.0};
  double error = 0.0;
  bool quadrature = false;
  void add(const HeatValue& h, Complex scale = 1.0) {
    value += scale * h.value;
    error += std::abs(scale) * h.errorBound;
    quadrature = quadrature || h.method == HeatMethod::Quadrature;
  }
  HeatValue result() const { return {value, error, quadrature ? HeatMethod::Quadrature : HeatMethod::ClosedForm}; }
};

HeatValue heat_generic_1d(const Symbol& f, double s, const Point& z, const HeatOptions& opts) {
  const double B = f.bound();
  if (!std::isfinite(B)) throw Error("heat_transform: tail not certified for unbounded symbol " + f.describe());
  const double L = gaussian_cutoff(s, B, opts.tolerance);
  const double tail = B * std::exp(-L * L / s);
  const double w0 = std::min(0.5 * std::sqrt(s), 0.5);
  Complex prev = 0.0;
  double diff = std::numeric_limits<double>::infinity();
  Complex cur = 0.0;
  for (int level = 0; level <= opts.maxRefinements; ++level) {
    const int M = 32 << level;
    const quad::Rule1D rule = quad::composite_legendre(0.0, L, {}, w0 / std::pow(2.0, level), 16);
    cur = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double r = rule.nodes[i];
      const double wr = rule.weights[i] * r * std::exp(-r * r / s);
      Complex ring = 0.0;
      for (int j = 0; j < M; ++j) ring += f(Point{z[0] + std::polar(r, 2.0 * kPi * j / M)});
      cur += wr * ring;
    }
    cur *= 2.0 / (s * M);
    if (level > 0) {
      diff = std::abs(cur - prev);
      if (diff <= opts.tolerance) break;
    }
    prev = cur;
  }
  return {cur, tail + diff, HeatMethod::Quadrature};
}

HeatValue heat_generic_nd(const Symbol& f, double s, const Point& z, const HeatOptions& opts) {
  const int n = z.dim();
  Complex prev = 0.0, cur = 0.0;
  double diff = std::numeric_limits<double>::infinity();
  for (int level = 0; level <= std::min(opts.maxRefinements, 3); ++level) {
    const int m = 12 + 8 * level;
    const quad::Rule1D gh = quad::gauss_hermite(m);
    const std::size_t perCoord = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= perCoord;
    cur = 0.0;
    Point w(n);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      double weight = 1.0;
      for (int j = 0; j < n; ++j) {
        const std::size_t local = rem % perCoord;
        rem /= perCoord;
        const std::size_t a = local / static_cast<std::size_t>(m), b = local % static_cast<std::size_t>(m);
        w[j] = z[j] - std::sqrt(s) * Complex(gh.nodes[a], gh.nodes[b]);
        weight *= gh.weights[a] * gh.weights[b] / kPi;
      }
      cur += weight * f(w);
    }
    if (level > 0) {
      diff = std::abs(cur - prev);
      if (diff <= opts.tolerance) break;
    }
    prev = cur;
  }
  return {cur, diff, HeatMethod::Quadrature};
}

HeatValue heat_via_modes(const std::vector<Harmonic>& modes, double bound, double s, const Point& z,
                         const HeatOptions& opts) {
  const double radius = std::abs(z[0]);
  const double theta = radius > 0.0 ? std::arg(z[0]) : 0.0;
  const double L = gaussian_cutoff(s, bound, opts.tolerance);
  const double tail = bound * std::exp(-L * L / s);
  const double w0 = std::min(0.25 * std::sqrt(s), 0.25);
  Complex coarse = 0.0, fine = 0.0;
  for (const Harmonic& h : modes) {
    if (radius == 0.0 && h.m != 0) continue;
    const Complex ph = std::polar(1.0, h.m * theta);
    coarse += ph * radial_heat_mode(h.rho, h.m, s, radius, h.breakpoints, L, w0, 16);
    fine += ph * radial_heat_mode(h.rho, h.m, s, radius, h.breakpoints, L, 0.5 * w0, 16);
  }
  return {fine, tail + std::abs(fine - coarse), HeatMethod::Quadrature};
}

HeatValue heat_rec(const Symbol& f, double s, const Point& z, const HeatOptions& opts) {
  const SymbolNode& nd = f.node();
  const int n = z.dim();
  switch (nd.kind) {
    case SymbolKind::Constant:
      return {nd.value, 0.0, HeatMethod::ClosedForm};
    case SymbolKind::Gaussian: {
      const Complex u = 1.0 + nd.gamma * s;
      return {std::pow(u, -static_cast<double>(n)) * std::exp(-nd.gamma * z.norm2() / u), 0.0,
              HeatMethod::ClosedForm};
    }
    case SymbolKind::PolyGaussian: {
      const auto [p, g] = heat_poly_gaussian(nd.coeffs, nd.gamma, s, n);
      const double v = z.norm2();
      return {poly_eval(p, v) * std::exp(-g * v), 0.0, HeatMethod::ClosedForm};
    }
    case SymbolKind::PlaneWave:
      return {std::exp(-s * nd.direction.norm2() / 4.0) * f(z), 0.0, HeatMethod::ClosedForm};
    case SymbolKind::SmoothSign: {
      // One-dimensional smoothing along the direction: X ~ N(0, s|u|^2/2).
      const double a = std::real(dot(z, nd.direction));
      const double sd = std::sqrt(s) * nd.direction.norm();
      auto at = [&](int m) {
        const quad::Rule1D gh = quad::gauss_hermite(m);
        double acc = 0.0;
        for (std::size_t i = 0; i < gh.size(); ++i) acc += gh.weights[i] * std::tanh((a - sd * gh.nodes[i]) / nd.width);
        return acc / std::sqrt(kPi);
      };
      const double v1 = at(64), v2 = at(96);
      return {v2, std::abs(v2 - v1), HeatMethod::Quadrature};
    }
    case SymbolKind::Sum: {
      Accum acc;
      for (const Symbol& c : nd.children) acc.add(heat_rec(c, s, z, opts));
      return acc.result();
    }
    case SymbolKind::Product: {
      Complex scale = 1.0;
      const Symbol* other = nullptr;
      int nonConst = 0;
      for (const Symbol& c : nd.children) {
        if (c.kind() == SymbolKind::Constant) {
          scale *= c.node().value;
        } else {
          other = &c;
          ++nonConst;
        }
      }
      if (nonConst == 0) return {scale, 0.0, HeatMethod::ClosedForm};
      if (nonConst == 1) {
        Accum acc;
        acc.add(heat_rec(*other, s, z, opts), scale);
        return acc.result();
      }
      break;
    }
    case SymbolKind::Affine:
      return heat_rec(nd.children.front(), s * nd.scale * nd.scale, affine_image(nd, z), opts);
    case SymbolKind::Heat:
      return heat_rec(nd.children.front(), nd.s + s, z, opts);
    default:
      break;
  }
  if (n == 1) {
    if (auto modes = harmonic_decomposition(f, 1)) return heat_via_modes(*modes, f.bound(), s, z, opts);
    return heat_generic_1d(f, s, z, opts);
  }
  return heat_generic_nd(f, s, z, opts);
}

}  // namespace

HeatValue heat_transform(const Symbol& f, double s, const Point& z, const HeatOptions& opts) {
  if (!(s > 0.0)) throw Error("heat_transform: s must be positive");
  return heat_rec(f, s, z, opts);
}

HeatTransformResult heat_transform(const Symbol& f, double s, const std::vector<Point>& zs, const HeatOptions& opts) {
  HeatTransformResult res;
  res.s = s;
  res.points = zs;
  for (const Point& z : zs) {
    const HeatValue h = heat_transform(f, s, z, opts);
    res.values.push_back(h.value);
    res.errorBound = std::max(res.errorBound, h.errorBound);
    if (h.method == HeatMethod::Quadrature) res.method = HeatMethod::Quadrature;
  }
  return res;
}

Symbol heat_symbol(const Symbol& f, double s, int n) {
  if (!(s > 0.0)) throw Error("heat_symbol: s must be positive");
  const SymbolNode& nd = f.node();
  switch (nd.kind) {
    case SymbolKind::Constant:
      return f;
    case SymbolKind::Gaussian: {
      const Complex u = 1.0 + nd.gamma * s;
      return Symbol::complex_gaussian(nd.gamma / u).scaled(std::pow(u, -static_cast<double>(n)));
    }
    case SymbolKind::PolyGaussian: {
      auto [p, g] = heat_poly_gaussian(nd.coeffs, nd.gamma, s, n);
      return Symbol::complex_poly_gaussian(std::move(p), g);
    }
    case SymbolKind::PlaneWave:
      return f.scaled(std::exp(-s * nd.direction.norm2() / 4.0));
    case SymbolKind::Sum: {
      std::vector<Symbol> parts;
      for (const Symbol& c : nd.children) parts.push_back(heat_symbol(c, s, n));
      return Symbol::sum(std::move(parts));
    }
    case SymbolKind::Product: {
      Complex scale = 1.0;
      std::vector<Symbol> rest;
      for (const Symbol& c : nd.children) {
        if (c.kind() == SymbolKind::Constant) {
          scale *= c.node().value;
        } else {
          rest.push_back(c);
        }
      }
      if (rest.empty()) return Symbol::constant(scale);
      if (rest.size() == 1) return heat_symbol(rest.front(), s, n).scaled(scale);
      break;
    }
    case SymbolKind::Affine: {
      Symbol inner = heat_symbol(nd.children.front(), s * nd.scale * nd.scale, n);
      inner = inner.dilate(nd.scale);
      if (nd.flip == -1) inner = inner.reflect();
      if (nd.center.dim() != 0) inner = inner.translate(nd.center);
      return inner;
    }
    case SymbolKind::Heat:
      return heat_symbol(nd.children.front(), nd.s + s, n);
    default:
      break;
  }
  return Symbol::heat_of(f, s);
}

namespace {

double max_abs_on_circle(const std::vector<std::pair<int, Complex>>& harmonics) {
  auto val = [&](double th) {
    Complex s = 0.0;
    for (const auto& [m, phi] : harmonics) s += phi * std::polar(1.0, m * th);
    return std::abs(s);
  };
  const int M = 4096;
  double best = 0.0, bestTh = 0.0;
  for (int j = 0; j < M; ++j) {
    const double th = 2.0 * kPi * j / M;
    const double v = val(th);
    if (v > best) {
      best = v;
      bestTh = th;
    }
  }
  double a = bestTh - 2.0 * kPi / M, b = bestTh + 2.0 * kPi / M;
  constexpr double g = 0.6180339887498949;
  for (int it = 0; it < 80; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (val(c) > val(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::max(best, val(0.5 * (a + b)));
}

double sampled_heat_sup(const Symbol& f, double s, int n) {
  const double cap = f.bound();
  double best = 0.0;
  auto consider = [&](const Point& z) { best = std::max(best, std::abs(heat_transform(f, s, z).value)); };
  double reach = 6.0 + 6.0 * std::sqrt(s);
  for (double b : f.breakpoints()) reach = std::max(reach, b + 6.0 * std::sqrt(s));
  if (n == 1) {
    const int nr = 96, M = f.is_radial() ? 1 : 64;
    for (int i = 0; i <= nr; ++i)
      for (int j = 0; j < M; ++j) consider(Point{std::polar(reach * i / nr, 2.0 * kPi * j / M)});
  } else {
    for (int i = 0; i <= 48; ++i) {
      Point z(n);
      z[0] = reach * i / 48;
      consider(z);
    }
  }
  return std::min(best, std::isfinite(cap) ? cap : best);
}

}  // namespace

double heat_sup(const Symbol& f, double s, int n) {
  const SymbolNode& nd = f.node();
  switch (nd.kind) {
    case SymbolKind::Constant:
      return std::abs(nd.value);
    case SymbolKind::Gaussian:
      return std::pow(std::abs(1.0 + nd.gamma * s), -static_cast<double>(n));
    case SymbolKind::PlaneWave:
      return std::exp(-s * nd.direction.norm2() / 4.0);
    case SymbolKind::Angular:
      // |f^(s)| <= sup|f| = max|phi|, attained in the limit |z| -> infinity.
      return max_abs_on_circle(nd.harmonics);
    case SymbolKind::Affine:
      return heat_sup(nd.children.front(), s * nd.scale * nd.scale, n);
    case SymbolKind::Heat:
      return heat_sup(nd.children.front(), nd.s + s, n);
    case SymbolKind::Product: {
      Complex scale = 1.0;
      const Symbol* other = nullptr;
      int nonConst = 0;
      for (const Symbol& c : nd.children) {
        if (c.kind() == SymbolKind::Constant) {
          scale *= c.node().value;
        } else {
          other = &c;
          ++nonConst;
        }
      }
      if (nonConst == 0) return std::abs(scale);
      if (nonConst == 1) return std::abs(scale) * heat_sup(*other, s, n);
      break;
    }
    default:
      break;
  }
  return sampled_heat_sup(f, s, n);
}

// ---------------------------------------------------------------------------
// Structural decompositions

std::optional<std::vector<GaussianTerm>> gaussian_decomposition(const Symbol& f, int n) {
  const SymbolNode& nd = f.node();
  switch (nd.kind) {
    case SymbolKind::Gaussian:
    case SymbolKind::PolyGaussian: {
      if (nd.gamma.imag() != 0.0 || !(nd.gamma.real() > 0.0)) return std::nullopt;
      GaussianTerm t;
      t.gamma = nd.gamma.real();
      t.center = Point(n);
      t.poly = nd.kind == SymbolKind::Gaussian ? Poly{Complex(1.0)} : nd.coeffs;
      return std::vector<GaussianTerm>{t};
    }
    case SymbolKind::Sum: {
      std::vector<GaussianTerm> out;
      for (const Symbol& c : nd.children) {
        auto part = gaussian_decomposition(c, n);
        if (!part) return std::nullopt;
        out.insert(out.end(), part->begin(), part->end());
      }
      return out;
    }
    case SymbolKind::Product: {
      Complex scale = 1.0;
      const Symbol* other = nullptr;
      int nonConst = 0;
      for (const Symbol& c : nd.children) {
        if (c.kind() == SymbolKind::Constant) {
          scale *= c.node().value;
        } else {
          other = &c;
          ++nonConst;
        }
      }
      if (nonConst != 1) return std::nullopt;
      auto part = gaussian_decomposition(*other, n);
      if (!part) return std::nullopt;
      for (auto& t : *part) t.amplitude *= scale;
      return part;
    }
    case SymbolKind::Affine: {
      auto part = gaussian_decomposition(nd.children.front(), n);
      if (!part) return std::nullopt;
      // t(sigma lambda (z - c)) with t centered at c0: center c + c0 / (sigma lambda).
      const double l2 = nd.scale * nd.scale;
      for (auto& t : *part) {
        t.gamma *= l2;
        double f2 = 1.0;
        for (auto& p : t.poly) {
          p *= f2;
          f2 *= l2;
        }
        Point c = (1.0 / (nd.flip * nd.scale)) * t.center;
        if (nd.center.dim() != 0) c += nd.center;
        t.center = c;
      }
      return part;
    }
    default:
      return std::nullopt;
  }
}

std::optional<std::vector<Harmonic>> harmonic_decomposition(const Symbol& f, int n) {
  const SymbolNode& nd = f.node();
  switch (nd.kind) {
    case SymbolKind::Constant: {
      Harmonic h;
      const Complex c = nd.value;
      h.rho = [c](double) { return c; };
      h.closedForm = true;
      h.terms = {{Complex(0.0), {c}}};
      return std::vector<Harmonic>{h};
    }
    case SymbolKind::Gaussian:
    case SymbolKind::PolyGaussian: {
      Harmonic h;
      const Complex g = nd.gamma;
      const Poly p = nd.kind == SymbolKind::Gaussian ? Poly{Complex(1.0)} : nd.coeffs;
      h.rho = [g, p](double r) { return poly_eval(p, r * r) * std::exp(-g * r * r); };
      h.closedForm = true;
      h.terms = {{g, p}};
      return std::vector<Harmonic>{h};
    }
    case SymbolKind::Radial: {
      Harmonic h;
      const Symbol copy = f;
      h.rho = [copy, n](double r) {
        Point z(n);
        z[0] = r;
        return copy(z);
      };
      h.breakpoints = f.breakpoints();
      return std::vector<Harmonic>{h};
    }
    case SymbolKind::Angular: {
      if (n != 1) return std::nullopt;
      std::vector<Harmonic> out;
      const double r0 = nd.r0;
      for (const auto& [m, phi] : nd.harmonics) {
        Harmonic h;
        h.m = m;
        const Complex c = phi;
        h.rho = [c, r0](double r) { return c * special::smooth_step(r - r0); };
        h.breakpoints = {r0, r0 + 1.0};
        out.push_back(std::move(h));
      }
      return out;
    }
    case SymbolKind::Sum: {
      std::vector<Harmonic> out;
      for (const Symbol& c : nd.children) {
        auto part = harmonic_decomposition(c, n);
        if (!part) return std::nullopt;
        out.insert(out.end(), part->begin(), part->end());
      }
      return out;
    }
    case SymbolKind::Product: {
      std::vector<Harmonic> acc;
      bool first = true;
      for (const Symbol& c : nd.children) {
        auto part = harmonic_decomposition(c, n);
        if (!part) return std::nullopt;
        if (first) {
          acc = std::move(*part);
          first = false;
          continue;
        }
        std::vector<Harmonic> next;
        for (const Harmonic& a : acc) {
          for (const Harmonic& b : *part) {
            Harmonic h;
            h.m = a.m + b.m;
            auto ra = a.rho, rb = b.rho;
            h.rho = [ra, rb](double r) { return ra(r) * rb(r); };
            h.closedForm = a.closedForm && b.closedForm;
            if (h.closedForm) {
              for (const auto& ta : a.terms)
                for (const auto& tb : b.terms) h.terms.push_back({ta.gamma + tb.gamma, poly_mul(ta.poly, tb.poly)});
            }
            h.breakpoints = a.breakpoints;
            h.breakpoints.insert(h.breakpoints.end(), b.breakpoints.begin(), b.breakpoints.end());
            next.push_back(std::move(h));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    case SymbolKind::Affine: {
      if (!centered(nd)) return std::nullopt;
      auto part = harmonic_decomposition(nd.children.front(), n);
      if (!part) return std::nullopt;
      const double lam = nd.scale;
      for (Harmonic& h : *part) {
        // child(sigma lambda z): r -> lambda r, theta -> theta + pi when flipped.
        const Complex ph = (nd.flip == -1 && h.m % 2 != 0) ? Complex(-1.0) : Complex(1.0);
        auto inner = h.rho;
        h.rho = [inner, lam, ph](double r) { return ph * inner(lam * r); };
        for (auto& t : h.terms) {
          t.gamma *= lam * lam;
          double f2 = 1.0;
          for (auto& p : t.poly) {
            p *= ph * f2;
            f2 *= lam * lam;
          }
        }
        for (double& b : h.breakpoints) b /= lam;
      }
      return part;
    }
    case SymbolKind::Heat: {
      auto part = harmonic_decomposition(nd.children.front(), n);
      if (!part) return std::nullopt;
      const double s = nd.s;
      const double bound = nd.children.front().bound();
      std::vector<Harmonic> out;
      for (const Harmonic& h : *part) {
        Harmonic g;
        g.m = h.m;
        if (h.closedForm && h.m == 0) {
          g.closedForm = true;
          for (const auto& t : h.terms) {
            auto [p, gm] = heat_poly_gaussian(t.poly, t.gamma, s, n);
            g.terms.push_back({gm, p});
          }
          auto terms = g.terms;
          g.rho = [terms](double r) {
            Complex v = 0.0;
            for (const auto& t : terms) v += poly_eval(t.poly, r * r) * std::exp(-t.gamma * r * r);
            return v;
          };
        } else {
          if (n != 1) return std::nullopt;
          const double L = gaussian_cutoff(s, bound, 1e-14);
          const double w = std::min(0.125 * std::sqrt(s), 0.125);
          auto rho = h.rho;
          auto br = h.breakpoints;
          const int m = h.m;
          g.rho = [rho, br, m, s, L, w](double r) { return radial_heat_mode(rho, m, s, r, br, L, w, 16); };
        }
        out.push_back(std::move(g));
      }
      return out;
    }
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Regularity probes

namespace {

std::vector<Point> directions(int n) {
  std::vector<Point> out;
  if (n == 1) return {Point{Complex(1.0)}};
  for (int j = 0; j < n; ++j) {
    Point e(n);
    e[j] = 1.0;
    out.push_back(e);
    for (int k = j + 1; k < n; ++k) {
      for (Complex c : {Complex(1.0), Complex(-1.0), Complex(0.0, 1.0)}) {
        Point d(n);
        d[j] = 1.0 / std::sqrt(2.0);
        d[k] = c / std::sqrt(2.0);
        out.push_back(d);
      }
    }
  }
  return out;
}

double max_shift_difference(const Symbol& f, double R, int n, double radius, int Mz, int nw, int Mw) {
  double best = 0.0;
  const auto dirs = directions(n);
  // For radial f every point of the sphere is equivalent.
  if (f.is_radial()) Mz = 1;
  for (const Point& d : f.is_radial() ? std::vector<Point>{dirs.front()} : dirs) {
    for (int a = 0; a < Mz; ++a) {
      const Point z = std::polar(R, 2.0 * kPi * a / Mz) * d;
      const Complex fz = f(z);
      for (const Point& e : dirs) {
        for (int i = 1; i <= nw; ++i) {
          const double rho = radius * i / nw;
          for (int b = 0; b < Mw; ++b) {
            const Point w = std::polar(rho, 2.0 * kPi * b / Mw) * e;
            best = std::max(best, std::abs(fz - f(z - w)));
          }
        }
      }
    }
  }
  return best;
}

double max_on_sphere(const Symbol& f, double R, int n, int Mz) {
  double best = 0.0;
  for (const Point& d : directions(n))
    for (int a = 0; a < Mz; ++a) best = std::max(best, std::abs(f(std::polar(R, 2.0 * kPi * a / Mz) * d)));
  return best;
}

bool decays(const std::vector<double>& v, double decay, double floor) {
  if (v.size() < 3) return false;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (!(v[i + 1] < v[i] || v[i + 1] <= floor)) return false;
  return v.back() <= std::max(decay * v.front(), floor);
}

}  // namespace

ModulusEstimate vo_modulus(const Symbol& f, double R, int n, double radius) {
  return {max_shift_difference(f, R, n, radius, 64, 4, 16), max_shift_difference(f, R, n, radius, 128, 8, 32)};
}

ModulusEstimate c0_tail(const Symbol& f, double R, int n) {
  return {max_on_sphere(f, R, n, 256), max_on_sphere(f, R, n, 512)};
}

TagCheck check_tag(const Symbol& f, SymbolTag tag, const std::vector<double>& radii, int n, double decay) {
  TagCheck res;
  res.tag = tag;
  res.radii = radii;
  constexpr double floor = 1e-14;
  switch (tag) {
    case SymbolTag::Bounded: {
      const double b = f.bound();
      double seen = std::abs(f(Point(n)));
      for (double R : radii) seen = std::max(seen, c0_tail(f, R, n).refined);
      res.values = {seen, b};
      res.passed = std::isfinite(b) && seen <= b * (1.0 + 1e-12) + 1e-300;
      res.detail = "sampled sup vs certified bound";
      break;
    }
    case SymbolTag::C0:
      for (double R : radii) res.values.push_back(c0_tail(f, R, n).refined);
      res.passed = decays(res.values, decay, floor);
      res.detail = "sup_{|z|=R} |f| strictly decreasing, last <= decay * first";
      break;
    case SymbolTag::VanishingOscillation:
      for (double R : radii) res.values.push_back(vo_modulus(f, R, n).refined);
      res.passed = decays(res.values, decay, floor);
      res.detail = "sup_{|z|=R,|w|<=1} |f(z)-f(z-w)| strictly decreasing, last <= decay * first";
      break;
    case SymbolTag::BUC: {
      for (double delta : {0.1, 0.05, 0.025}) {
        double m = 0.0;
        for (double R : radii) m = std::max(m, max_shift_difference(f, R, n, delta, 128, 2, 16));
        res.values.push_back(m);
      }
      res.passed = res.values[2] <= 0.75 * res.values[0] + floor && res.values[1] <= res.values[0] + floor;
      res.detail = "small-shift modulus over the radius grid at delta = 0.1, 0.05, 0.025";
      break;
    }
    case SymbolTag::SlowlyOscillating: {
      for (double R : radii) res.values.push_back(max_shift_difference(f, R, n, 0.1, 128, 2, 16));
      bool monotone = true;
      for (std::size_t i = 0; i + 1 < res.values.size(); ++i)
        monotone = monotone && res.values[i + 1] <= res.values[i] * (1.0 + 1e-9) + floor;
      res.passed = monotone && !res.values.empty() && res.values.back() < 0.1;
      res.detail = "0.1-shift modulus non-increasing in R and below 0.1 at the largest radius";
      break;
    }
  }
  return res;
}

}  // namespace focklab
