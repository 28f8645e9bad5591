#include "focklab/fock_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "focklab/quadrature.hpp"
#include "focklab/special.hpp"

namespace focklab {

double basis_norm_1d(NormExponent p, int k) {
  if (k < 0) throw Error("basis_norm: negative degree");
  const double lf = 0.5 * special::log_factorial(k);
  switch (p) {
    case NormExponent::Two:
      return 1.0;
    case NormExponent::One:
      return std::exp(0.5 * k * std::log(2.0) + std::lgamma(0.5 * k + 1.0) - lf);
    case NormExponent::Infinity:
    case NormExponent::LittleInfinity:
      if (k == 0) return 1.0;
      return std::exp(0.5 * k * std::log(static_cast<double>(k)) - 0.5 * k - lf);
  }
  throw Error("basis_norm: unsupported exponent");
}

double basis_norm(const FockParams& params, const MultiIndex& alpha) {
  params.validate();
  double v = 1.0;
  for (int j = 0; j < params.n; ++j) v *= basis_norm_1d(params.p, alpha[static_cast<std::size_t>(j)]);
  return v;
}

double basis_norm_product_formula(int k) {
  if (k < 0) throw Error("basis_norm_product_formula: negative degree");
  if (k == 0) return 1.0;
  return std::exp(0.5 * k * std::log(2.0 * k) + std::lgamma(0.5 * k + 1.0) - 0.5 * k -
                  special::log_factorial(k));
}

Complex kernel_eval(const FockParams& params, const Point& z, const Point& w) {
  return std::exp(dot(w, z) / params.t);
}

Complex normalized_kernel_eval(const FockParams& params, const Point& z, const Point& w) {
  return std::exp(dot(w, z) / params.t - z.norm2() / (2.0 * params.t));
}

KernelExpansion kernel_expand(const BasisPtr& basis, const Point& z) {
  const double x = z.norm2() / basis->t();
  Eigen::VectorXcd c = basis->evaluate(z).conjugate();
  // sum_{|alpha| <= N} |e_alpha(z)|^2 = e^x Q(N + 1, x) for every n.
  const double err2 = std::exp(x) * special::gamma_p(basis->max_degree() + 1.0, x);
  return {TruncatedVector(basis, std::move(c)), std::sqrt(err2)};
}

KernelExpansion normalized_kernel_expand(const BasisPtr& basis, const Point& z) {
  const double x = z.norm2() / basis->t();
  Eigen::VectorXcd c = basis->evaluate_weighted(z).conjugate();
  const double err2 = special::gamma_p(basis->max_degree() + 1.0, x);
  return {TruncatedVector(basis, std::move(c)), std::sqrt(err2)};
}

Eigen::MatrixXcd weyl_matrix_1d(double t, int maxDegree, Complex z, bool unweighted) {
  const int n1 = maxDegree + 1;
  if (z == Complex(0.0)) return Eigen::MatrixXcd::Identity(n1, n1);
  const Complex xi = std::conj(z) / std::sqrt(t);
  const double x = std::norm(xi);
  const double lxi = 0.5 * std::log(x);
  const double gauss = unweighted ? 0.0 : -0.5 * x;
  const double phLower = std::arg(xi);
  const double phUpper = std::arg(-std::conj(xi));
  Eigen::MatrixXcd w(n1, n1);
  for (int a = 0; a <= maxDegree; ++a) {
    const std::vector<double> lag = special::laguerre_sequence(maxDegree - a, a, x);
    for (int j = 0; j + a <= maxDegree; ++j) {
      const double l = lag[static_cast<std::size_t>(j)];
      const double lm = 0.5 * (special::log_factorial(j) - special::log_factorial(j + a)) + a * lxi + gauss;
      const double mag = std::exp(lm) * l;
      w(j + a, j) = std::polar(1.0, a * phLower) * mag;
      if (a > 0) w(j, j + a) = std::polar(1.0, a * phUpper) * mag;
    }
  }
  return w;
}

OperatorMatrix weyl_matrix(const BasisPtr& basis, const Point& z, bool unweighted) {
  const int n = basis->n();
  if (z.dim() != n) throw Error("weyl_matrix: dimension mismatch");
  const int N = basis->max_degree();
  if (n == 1) return {basis, weyl_matrix_1d(basis->t(), N, z[0], unweighted)};
  std::array<Eigen::MatrixXcd, kMaxDimension> factors;
  for (int j = 0; j < n; ++j) factors[static_cast<std::size_t>(j)] = weyl_matrix_1d(basis->t(), N, z[j], unweighted);
  const Eigen::Index d = basis->dim();
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    const MultiIndex& a = basis->index(col);
    for (Eigen::Index row = 0; row < d; ++row) {
      const MultiIndex& b = basis->index(row);
      Complex v = 1.0;
      for (int j = 0; j < n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        v *= factors[js](b[js], a[js]);
      }
      m(row, col) = v;
    }
  }
  return {basis, std::move(m)};
}

namespace {

Eigen::MatrixXcd weyl_by_hermite(const BasisPtr& basis, Complex z, int nodes) {
  const double t = basis->t();
  const int N = basis->max_degree();
  const quad::Rule1D gh = quad::gauss_hermite(nodes);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(N + 1, N + 1);
  const double st = std::sqrt(t);
  Eigen::VectorXcd shifted(N + 1), plain(N + 1);
  // <W e_k, e_m> = (1/pi) sum_ij w_i w_j k_z(w) e_k(w - z) conj(e_m(w)),
  // w = sqrt(t)(u + iv), against the weight exp(-u^2 - v^2).
  for (std::size_t i = 0; i < gh.size(); ++i) {
    for (std::size_t j = 0; j < gh.size(); ++j) {
      const Complex w(st * gh.nodes[i], st * gh.nodes[j]);
      const Complex kz = std::exp(w * std::conj(z) / t - std::norm(z) / (2.0 * t));
      const Complex u = w - z;
      shifted(0) = plain(0) = 1.0;
      for (int k = 1; k <= N; ++k) {
        shifted(k) = shifted(k - 1) * u / std::sqrt(t * k);
        plain(k) = plain(k - 1) * w / std::sqrt(t * k);
      }
      const double wt = gh.weights[i] * gh.weights[j] / kPi;
      acc.noalias() += (wt * kz) * plain.conjugate() * shifted.transpose();
    }
  }
  return acc;
}

}  // namespace

WeylQuadrature weyl_matrix_quadrature(const BasisPtr& basis, const Point& z, int nodes) {
  if (basis->n() != 1) throw Error("weyl_matrix_quadrature: only n = 1 is supported");
  const double r = z.norm() / std::sqrt(basis->t());
  if (nodes <= 0) nodes = basis->max_degree() + 40 + static_cast<int>(std::ceil(8.0 * r));
  Eigen::MatrixXcd a = weyl_by_hermite(basis, z[0], nodes);
  Eigen::MatrixXcd b = weyl_by_hermite(basis, z[0], nodes + 16);
  const double err = (a - b).cwiseAbs().maxCoeff();
  return {OperatorMatrix(basis, std::move(b)), err, nodes + 16};
}

OperatorMatrix weyl_matrix_checked(const BasisPtr& basis, const Point& z, double tolerance) {
  OperatorMatrix w = weyl_matrix(basis, z);
  const WeylQuadrature q = weyl_matrix_quadrature(basis, z);
  if (q.errorEstimate > tolerance) {
    throw Error("weyl_matrix_checked: quadrature oracle unresolved (error " + std::to_string(q.errorEstimate) + ")");
  }
  const double diff = (w.entries() - q.matrix.entries()).cwiseAbs().maxCoeff();
  if (diff > tolerance) {
    throw Error("weyl_matrix_checked: closed form and quadrature differ by " + std::to_string(diff));
  }
  return w;
}

Complex weyl_composition_phase(double t, const Point& z, const Point& w) {
  return std::exp(-kI * std::imag(dot(z, w)) / t);
}

// ---------------------------------------------------------------------------
// F^p norms

namespace {

struct Term {
  MultiIndex alpha;
  int degree;
  Complex c;
};

std::vector<Term> nonzero_terms(const TruncatedVector& v) {
  std::vector<Term> out;
  for (Eigen::Index i = 0; i < v.coeffs.size(); ++i) {
    if (v.coeffs(i) != Complex(0.0)) out.push_back({v.basis->index(i), v.basis->degree_of(i), v.coeffs(i)});
  }
  return out;
}

int max_coordinate_degree(const std::vector<Term>& terms, int n) {
  int m = 0;
  for (const Term& tm : terms)
    for (int j = 0; j < n; ++j) m = std::max(m, tm.alpha[static_cast<std::size_t>(j)]);
  return m;
}

// |f(z)| e^{-|z|^2/2t} on a ring |z| = r (n = 1), M equally spaced angles.
class RingEvaluator {
 public:
  RingEvaluator(const std::vector<Term>& terms, double t) : terms_(terms), t_(t) {}

  void evaluate(double r, int M, std::vector<double>& out) {
    if (static_cast<int>(roots_.size()) != M) {
      roots_.resize(static_cast<std::size_t>(M));
      for (int j = 0; j < M; ++j) roots_[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * kPi * j / M);
    }
    amps_.resize(terms_.size());
    const double lr = r > 0.0 ? std::log(r) : -1e300;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const int k = terms_[i].alpha[0];
      if (r == 0.0) {
        amps_[i] = k == 0 ? terms_[i].c : Complex(0.0);
        continue;
      }
      const double lm = k * lr - 0.5 * k * std::log(t_) - 0.5 * special::log_factorial(k) - r * r / (2.0 * t_);
      amps_[i] = terms_[i].c * std::exp(lm);
    }
    out.assign(static_cast<std::size_t>(M), 0.0);
    for (int j = 0; j < M; ++j) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < terms_.size(); ++i) {
        const int k = terms_[i].alpha[0];
        s += amps_[i] * roots_[static_cast<std::size_t>((static_cast<long>(k) * j) % M)];
      }
      out[static_cast<std::size_t>(j)] = std::abs(s);
    }
  }

 private:
  const std::vector<Term>& terms_;
  double t_;
  std::vector<Complex> roots_;
  std::vector<Complex> amps_;
};

double weighted_abs(const std::vector<Term>& terms, double t, int n, const Point& z) {
  const double gauss = -z.norm2() / (2.0 * t);
  Complex s = 0.0;
  for (const Term& tm : terms) {
    double lm = gauss;
    double ph = 0.0;
    bool vanish = false;
    for (int j = 0; j < n; ++j) {
      const int k = tm.alpha[static_cast<std::size_t>(j)];
      if (k == 0) continue;
      const double r = std::abs(z[j]);
      if (r == 0.0) {
        vanish = true;
        break;
      }
      lm += k * std::log(r) - 0.5 * k * std::log(t) - 0.5 * special::log_factorial(k);
      ph += k * std::arg(z[j]);
    }
    if (!vanish) s += tm.c * std::polar(std::exp(lm), ph);
  }
  return std::abs(s);
}

// Tail of the F^1 integral outside the polydisc-complement {some |z_j| > R}.
double l1_tail(const std::vector<Term>& terms, double t, int n, double R) {
  const double x = R * R / (2.0 * t);
  double tail = 0.0;
  for (const Term& tm : terms) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      double prod = 1.0;
      for (int i = 0; i < n; ++i) {
        const int k = tm.alpha[static_cast<std::size_t>(i)];
        prod *= basis_norm_1d(NormExponent::One, k);
        if (i == j) prod *= special::gamma_q(0.5 * k + 1.0, x);
      }
      sum += prod;
    }
    tail += std::abs(tm.c) * sum;
  }
  return tail;
}

// Bound of |f| e^{-|z|^2/2t} where some |z_j| >= R, valid when R^2 >= k t for all degrees.
double sup_tail(const std::vector<Term>& terms, double t, int n, double R) {
  double tail = 0.0;
  for (const Term& tm : terms) {
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
      double prod = 1.0;
      for (int i = 0; i < n; ++i) {
        const int k = tm.alpha[static_cast<std::size_t>(i)];
        if (i == j) {
          prod *= std::exp(k * std::log(R) - 0.5 * k * std::log(t) - 0.5 * special::log_factorial(k) -
                           R * R / (2.0 * t));
        } else {
          prod *= basis_norm_1d(NormExponent::Infinity, k);
        }
      }
      best = std::max(best, prod);
    }
    tail += std::abs(tm.c) * best;
  }
  return tail;
}

double coefficient_l1_scale(const std::vector<Term>& terms, int n) {
  double s = 0.0;
  for (const Term& tm : terms) {
    double p = 1.0;
    for (int j = 0; j < n; ++j) p *= basis_norm_1d(NormExponent::One, tm.alpha[static_cast<std::size_t>(j)]);
    s += std::abs(tm.c) * p;
  }
  return s;
}

// Tensor polar rule over n coordinates: nodes r_j, theta_j per coordinate.
template <class F>
void for_each_polar_node(int n, const quad::Rule1D& radial, int M, F&& fn) {
  const std::size_t perCoord = radial.size() * static_cast<std::size_t>(M);
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= perCoord;
  Point z(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    double weight = 1.0;
    for (int j = 0; j < n; ++j) {
      const std::size_t local = rem % perCoord;
      rem /= perCoord;
      const std::size_t ri = local / static_cast<std::size_t>(M);
      const std::size_t ai = local % static_cast<std::size_t>(M);
      const double r = radial.nodes[ri];
      z[j] = std::polar(r, 2.0 * kPi * static_cast<double>(ai) / M);
      weight *= radial.weights[ri] * r;
    }
    fn(z, weight);
  }
}

FpNormResult l1_norm(const std::vector<Term>& terms, double t, int n, const FpNormOptions& opts) {
  const int K = max_coordinate_degree(terms, n);
  const double scale = coefficient_l1_scale(terms, n);
  FpNormResult res;
  // Cutoff: the tail must be negligible relative to the requested tolerance.
  double R = std::sqrt(2.0 * t * special::gamma_q_inv(0.5 * K + 1.0, std::min(0.5, 1e-3 * opts.tolerance / n)));
  R = std::max(R, 4.0 * std::sqrt(t));
  const bool oneD = (n == 1);
  double prev = -1.0;
  for (int level = 0; level <= opts.maxRefinements; ++level) {
    const double width = (oneD ? 0.5 : 1.0) * std::sqrt(t) / std::pow(2.0, level);
    const int perPanel = oneD ? 16 : 8;
    const int M = (oneD ? std::max(16, 4 * K + 8) : std::max(8, 2 * K + 8)) << level;
    const quad::Rule1D radial = quad::composite_legendre(0.0, R, {}, width, perPanel);
    double integral = 0.0;
    if (oneD) {
      RingEvaluator ring(terms, t);
      std::vector<double> vals;
      for (std::size_t i = 0; i < radial.size(); ++i) {
        ring.evaluate(radial.nodes[i], M, vals);
        double s = 0.0;
        for (double v : vals) s += v;
        integral += radial.weights[i] * radial.nodes[i] * s;
      }
      integral /= t * M;
    } else {
      const double angW = 2.0 * kPi / M;
      for_each_polar_node(n, radial, M, [&](const Point& z, double w) {
        integral += w * weighted_abs(terms, t, n, z);
      });
      integral *= std::pow(angW / (2.0 * kPi * t), n);
    }
    res.value = integral;
    res.radialNodes = static_cast<int>(radial.size());
    res.angularNodes = M;
    if (prev >= 0.0) {
      res.errorEstimate = std::abs(integral - prev);
      if (res.errorEstimate <= opts.tolerance * std::max(integral, 1e-300)) break;
      if (!oneD && level >= 2) break;
    }
    prev = integral;
  }
  res.R = R;
  res.tailBound = l1_tail(terms, t, n, R);
  if (res.tailBound > opts.tolerance * std::max(res.value, 1e-300) && res.tailBound > 1e-300) {
    throw Error("fp_norm: F^1 tail bound " + std::to_string(res.tailBound) + " not certified (scale " +
                std::to_string(scale) + ")");
  }
  return res;
}

// Coordinate-wise golden-section ascent in real coordinates, keeping the best value.
double polish_max(const std::function<double(const Point&)>& f, Point& z, double h, int n) {
  double best = f(z);
  constexpr double g = 0.6180339887498949;
  for (int sweep = 0; sweep < 40 && h > 1e-13; ++sweep) {
    const double before = best;
    for (int j = 0; j < n; ++j) {
      for (int part = 0; part < 2; ++part) {
        auto at = [&](double s) {
          Point q = z;
          q[j] += part == 0 ? Complex(s, 0.0) : Complex(0.0, s);
          return f(q);
        };
        double a = -h, b = h;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = at(c), fd = at(d);
        for (int it = 0; it < 60 && (b - a) > 1e-14; ++it) {
          if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = at(c);
          } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = at(d);
          }
        }
        const double s = 0.5 * (a + b);
        const double fs = at(s);
        if (fs > best) {
          best = fs;
          z[j] += part == 0 ? Complex(s, 0.0) : Complex(0.0, s);
        }
      }
    }
    if (best - before <= 1e-15 * best) h *= 0.25;
  }
  return best;
}

FpNormResult sup_norm(const std::vector<Term>& terms, double t, int n, const FpNormOptions& opts) {
  int K = 0;
  for (const Term& tm : terms) K = std::max(K, tm.degree);
  FpNormResult res;
  auto fval = [&](const Point& z) { return weighted_abs(terms, t, n, z); };
  // Cutoff with R^2 >= K t, beyond which every term is radially decreasing.
  double R = std::sqrt(std::max(1.0, static_cast<double>(K)) * t) + std::sqrt(t);
  double best = 0.0;
  Point bestZ(n);
  double prev = -1.0;
  const bool oneD = (n == 1);
  for (int level = 0; level <= opts.maxRefinements; ++level) {
    const int nr = (oneD ? std::max(64, 8 * K) : 12) << level;
    const int M = (oneD ? std::max(64, 8 * K) : 12) << level;
    double levelBest = -1.0;
    Point levelZ(n);
    // The cutoff grows until the tail bound is small relative to the grid maximum.
    for (;;) {
      const double tail = sup_tail(terms, t, n, R);
      if (levelBest < 0.0) {
        if (oneD) {
          RingEvaluator ring(terms, t);
          std::vector<double> vals;
          for (int i = 0; i <= nr; ++i) {
            const double r = R * i / nr;
            ring.evaluate(r, M, vals);
            for (int j = 0; j < M; ++j) {
              if (vals[static_cast<std::size_t>(j)] > levelBest) {
                levelBest = vals[static_cast<std::size_t>(j)];
                levelZ[0] = std::polar(r, 2.0 * kPi * j / M);
              }
            }
          }
        } else {
          quad::Rule1D grid;
          for (int i = 0; i <= nr; ++i) {
            grid.nodes.push_back(R * i / nr);
            grid.weights.push_back(1.0);
          }
          for_each_polar_node(n, grid, M, [&](const Point& z, double) {
            const double v = fval(z);
            if (v > levelBest) {
              levelBest = v;
              levelZ = z;
            }
          });
        }
      }
      if (tail <= 1e-3 * opts.tolerance * std::max(levelBest, 1e-300) || tail < 1e-300) {
        res.tailBound = tail;
        break;
      }
      R += std::sqrt(t);
      levelBest = -1.0;
      if (R > 1e3 * std::sqrt(t)) throw Error("fp_norm: F^inf tail bound cannot be certified");
    }
    const double h = std::max(R / nr, 2.0 * kPi * R / M);
    levelBest = polish_max(fval, levelZ, h, n);
    if (levelBest > best) {
      best = levelBest;
      bestZ = levelZ;
    }
    res.radialNodes = nr;
    res.angularNodes = M;
    if (prev >= 0.0) {
      res.errorEstimate = std::abs(levelBest - prev);
      if (res.errorEstimate <= opts.tolerance * best) break;
      if (!oneD && level >= 2) break;
    }
    prev = levelBest;
  }
  res.value = best;
  res.R = R;
  return res;
}

}  // namespace

FpNormResult fp_norm_detailed(const TruncatedVector& v, NormExponent p, const FpNormOptions& opts) {
  FpNormResult res;
  if (p == NormExponent::Two) {
    res.value = v.coeffs.norm();
    return res;
  }
  const std::vector<Term> terms = nonzero_terms(v);
  if (terms.empty()) return res;
  const double t = v.basis->t();
  const int n = v.basis->n();
  if (p == NormExponent::One) return l1_norm(terms, t, n, opts);
  return sup_norm(terms, t, n, opts);
}

double fp_norm(const TruncatedVector& v, NormExponent p, const FpNormOptions& opts) {
  return fp_norm_detailed(v, p, opts).value;
}

}  // namespace focklab
