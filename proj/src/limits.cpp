#include "focklab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "focklab/special.hpp"

namespace focklab {

namespace {

Point unit_direction(const Point& u) {
  const double len = u.norm();
  if (!(len > 0.0)) throw Error("DirectionApproximant: direction must be nonzero");
  return (1.0 / len) * u;
}

std::vector<Point> w_grid(int n, const LimitOptions& opts) {
  std::vector<Point> grid{Point::zero(n)};
  for (int k = 1; k <= opts.wRings; ++k) {
    const double r = opts.wRadius * k / opts.wRings;
    for (int j = 0; j < opts.wAngles; ++j) {
      const Complex e = std::polar(r, 2.0 * kPi * j / opts.wAngles);
      for (int axis = 0; axis < n; ++axis) {
        Point w(n);
        w[axis] = e;
        grid.push_back(w);
      }
    }
  }
  return grid;
}

bool tail_converged(const std::vector<double>& profile, double tol) {
  if (profile.size() < 2) return false;
  return profile[profile.size() - 1] < tol && profile[profile.size() - 2] < tol;
}

std::vector<Point> circle_points(int n, double R, int samples) {
  std::vector<Point> pts;
  for (int j = 0; j < samples; ++j) {
    const Complex e = std::polar(R, 2.0 * kPi * (j + 0.5) / samples);
    for (int axis = 0; axis < n; ++axis) {
      Point z(n);
      z[axis] = e;
      pts.push_back(z);
    }
    if (n > 1) {
      Point z(n);
      for (int axis = 0; axis < n; ++axis) z[axis] = e / std::sqrt(static_cast<double>(n));
      pts.push_back(z);
    }
  }
  return pts;
}

struct CircleTail {
  double value = 0.0;
  double errorBound = 0.0;
};

CircleTail berezin_circle_sup(const BerezinEvaluator& ev, int n, double R, int samples) {
  CircleTail out;
  for (const Point& z : circle_points(n, R, samples)) {
    const BerezinValue b = ev(z);
    out.value = std::max(out.value, std::abs(b.value));
    out.errorBound = std::max(out.errorBound, b.errorBound);
  }
  return out;
}

/// Strict decrease, where values at or below the roundoff floor count as
/// equal and vanished.
bool strictly_decreasing(const std::vector<double>& v, double floor = 1e-12) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1]) && !(v[i] <= floor && v[i - 1] <= floor)) return false;
  return !v.empty();
}

}  // namespace

DirectionApproximant::DirectionApproximant(Point u, std::vector<double> r, double tol)
    : direction(unit_direction(u)), radii(std::move(r)), cauchyTol(tol) {
  if (radii.size() < 3) throw Error("DirectionApproximant: need at least 3 radii");
  if (!(radii.front() > 0.0)) throw Error("DirectionApproximant: radii must be positive");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw Error("DirectionApproximant: radii must be strictly increasing");
  if (!(cauchyTol > 0.0)) throw Error("DirectionApproximant: cauchyTol must be positive");
}

DirectionApproximant DirectionApproximant::angle(double theta, std::vector<double> radii, double cauchyTol) {
  return DirectionApproximant(Point{std::polar(1.0, theta)}, std::move(radii), cauchyTol);
}

std::vector<double> angle_grid(int m) {
  if (m < 1) throw Error("angle_grid: need at least one angle");
  std::vector<double> th(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) th[static_cast<std::size_t>(j)] = 2.0 * kPi * j / m;
  return th;
}

LimitVerdict limit_symbol(const Symbol& f, const DirectionApproximant& dir, const Point& w,
                          const LimitOptions& opts) {
  if (!f.has(SymbolTag::Bounded)) throw Error("limit_symbol: symbol must be bounded");
  const int n = dir.direction.dim();
  if (w.dim() != n) throw Error("limit_symbol: dimension mismatch");

  LimitVerdict out;
  Complex prev = f(w - dir.radii.front() * dir.direction);
  for (std::size_t i = 1; i < dir.radii.size(); ++i) {
    const Complex v = f(w - dir.radii[i] * dir.direction);
    out.profile.push_back(std::abs(v - prev));
    prev = v;
  }
  out.value = prev;
  out.converged = tail_converged(out.profile, dir.cauchyTol);

  const Point far = dir.radii.back() * dir.direction;
  for (const Point& v : w_grid(n, opts)) out.wSpread = std::max(out.wSpread, std::abs(f(v + w - far) - out.value));
  out.constantInW = out.wSpread <= opts.wTolerance;

  if (!out.converged) {
    out.detail = "no directional limit: last differences " + std::to_string(out.profile.back());
  } else if (out.constantInW) {
    out.limitSymbol = Symbol::constant(out.value);
  } else {
    out.limitSymbol = f.translate(far);
    if (f.has(SymbolTag::VanishingOscillation)) out.detail = "limit depends on w on the compact grid";
  }
  return out;
}

LimitVerdict limit_operator(const Symbol& f, const DirectionApproximant& dir, const BasisPtr& basis,
                            const LimitOptions& opts) {
  if (basis->n() != dir.direction.dim()) throw Error("limit_operator: dimension mismatch");
  LimitVerdict out = limit_symbol(f, dir, Point::zero(basis->n()), opts);
  const bool symbolConverged = out.converged;
  out.profile.clear();

  OperatorMatrix prev = toeplitz_matrix(f.translate(dir.radii.front() * dir.direction), basis);
  for (std::size_t i = 1; i < dir.radii.size(); ++i) {
    OperatorMatrix cur = toeplitz_matrix(f.translate(dir.radii[i] * dir.direction), basis);
    out.profile.push_back(half_block_distance(cur, prev));
    prev = std::move(cur);
  }
  out.converged = symbolConverged && tail_converged(out.profile, dir.cauchyTol);
  if (!out.converged) {
    if (out.detail.empty()) out.detail = "translated Toeplitz matrices did not settle";
    out.limitOperator = prev;
    return out;
  }
  out.limitOperator = out.constantInW ? out.value * OperatorMatrix::identity(basis) : prev;
  return out;
}

EssentialSpectrum essential_spectrum_vo(const Symbol& f, const std::vector<double>& thetas,
                                        const std::vector<double>& radii, const std::vector<double>& voRadii) {
  EssentialSpectrum out;
  out.voCheck = check_tag(f, SymbolTag::VanishingOscillation, voRadii, 1);
  if (!out.voCheck.passed) {
    out.status = "vo-check-failed";
    return out;
  }
  out.status = "ok";
  for (double th : thetas) {
    const LimitVerdict v = limit_symbol(f, DirectionApproximant::angle(th, radii), Point::zero(1));
    if (!v.converged) {
      out.status = f.is_radial() ? "radial VO with non-directional boundary" : "unconverged-direction";
      out.thetas.clear();
      out.samples.clear();
      return out;
    }
    out.thetas.push_back(th);
    out.samples.push_back(v.value);
    out.toleranceRadius = std::max(out.toleranceRadius, v.profile.back());
  }
  return out;
}

FredholmWitness fredholm_witness(const Symbol& f, Complex lambda, const BasisPtr& basis,
                                 const std::vector<double>& radii, const FredholmOptions& opts) {
  if (basis->n() != 1) throw Error("fredholm_witness: implemented for n = 1");
  if (radii.empty()) throw Error("fredholm_witness: empty radius grid");
  FredholmWitness out;
  out.lambda = lambda;
  out.radii = radii;

  const double rho = opts.patchRadius;
  const double rmax = 2.0 * *std::max_element(radii.begin(), radii.end());
  out.margin = std::numeric_limits<double>::infinity();
  for (double r = rho; r <= rmax; r += 0.125) {
    for (int j = 0; j < 256; ++j) {
      const Point z{std::polar(r, 2.0 * kPi * j / 256)};
      out.margin = std::min(out.margin, std::abs(f(z) - lambda));
    }
  }
  if (!(out.margin >= opts.patchMargin)) {
    out.detail = "patch failure: inf |f - lambda| = " + std::to_string(out.margin) + " outside the patch";
    return out;
  }
  out.patched = true;

  const Complex gap0 = f(Point::zero(1)) - lambda;
  const Complex inside = std::abs(gap0) >= opts.patchMargin ? 1.0 / gap0 : Complex(0.0);
  const double margin = out.margin;
  auto h = [f, lambda, inside, rho, margin](const Point& z) -> Complex {
    const double chi = special::smooth_step(z.norm() - rho + 1.0);
    if (chi == 0.0) return inside;
    const Complex d = f(z) - lambda;
    // Inside the transition band the sampled margin does not apply.
    const Complex inv = std::abs(d) >= 0.5 * margin ? 1.0 / d : Complex(0.0);
    return chi * inv + (1.0 - chi) * inside;
  };
  const double bound = std::max(2.0 / margin, std::abs(inside)) + 1.0 / margin;
  const Symbol hs = Symbol::callable(h, bound, TagSet{SymbolTag::Bounded}, "fredholm-patch");

  const OperatorMatrix tf = toeplitz_matrix(f, basis);
  const OperatorMatrix b = toeplitz_matrix(hs, basis);
  const OperatorMatrix d = (tf - lambda * OperatorMatrix::identity(basis)) * b - OperatorMatrix::identity(basis);
  const BerezinEvaluator ev(d);
  for (double R : radii) out.tails.push_back(berezin_circle_sup(ev, 1, R, opts.circleSamples).value);
  out.passed = strictly_decreasing(out.tails);
  if (!out.passed) out.detail = "Berezin tail of the defect does not decrease";
  return out;
}

CompactnessProfile compactness_probe(const OperatorFactory& a, double t, int n, const std::vector<int>& ladder,
                                     const std::vector<double>& radii, const CompactnessOptions& opts) {
  if (ladder.empty()) throw Error("compactness_probe: empty ladder");
  CompactnessProfile out;
  out.ladder = ladder;
  out.radii = radii;

  std::vector<bool> decays;
  std::optional<OperatorMatrix> largest;
  for (int N : ladder) {
    const BasisPtr basis = MultiIndexBasis::make(t, n, N);
    OperatorMatrix m = a(basis);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.entries());
    const Eigen::VectorXd sv = svd.singularValues();
    const Eigen::Index last = sv.size() - 1;
    const Eigen::Index k = std::min<Eigen::Index>(opts.kProbe, last);
    const Eigen::Index k2 = std::min<Eigen::Index>(opts.kProbe / 2, last);
    const Eigen::Index k4 = std::min<Eigen::Index>(opts.kProbe / 4, last);
    const double s0 = sv.size() > 0 ? sv(0) : 0.0;
    const bool monotone = sv(k) <= sv(k2) && sv(k2) <= sv(k4);
    decays.push_back(s0 == 0.0 || (monotone && sv(k) <= opts.svFraction * s0));
    out.sigmaProbe.push_back(sv(k));
    int small = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) <= opts.smallRelative * s0) ++small;
    out.smallCounts.push_back(small);
    if (N == *std::max_element(ladder.begin(), ladder.end())) {
      out.singularValues = sv;
      largest = std::move(m);
    }
  }
  out.svDecays = decays.back();
  out.svStable = std::all_of(decays.begin(), decays.end(), [&](bool d) { return d == decays.front(); });

  const BerezinEvaluator ev(*largest);
  for (double R : radii) {
    const CircleTail c = berezin_circle_sup(ev, n, R, opts.circleSamples);
    out.tails.push_back(c.value);
    out.tailErrorBounds.push_back(c.errorBound);
  }
  out.tailDecays = strictly_decreasing(out.tails) &&
                   (out.tails.back() <= 1e-12 || out.tails.back() <= opts.tailFraction * out.tails.front());
  out.verdict = out.svDecays && out.svStable && out.tailDecays ? "compact-consistent" : "not compact-consistent";
  return out;
}

CommutatorProfile commutator_probe(const Symbol& f, const Symbol& g, double t, const std::vector<int>& ladder,
                                   const std::vector<double>& radii, const CompactnessOptions& opts) {
  CommutatorProfile out;
  out.fIsVO = f.has(SymbolTag::VanishingOscillation);
  out.gIsBUC = g.has(SymbolTag::BUC);
  double maxEntry = 0.0;
  const int nMax = *std::max_element(ladder.begin(), ladder.end());
  auto factory = [&](const BasisPtr& basis) {
    const OperatorMatrix tf = toeplitz_matrix(f, basis);
    const OperatorMatrix tg = toeplitz_matrix(g, basis);
    OperatorMatrix c = tf * tg - tg * tf;
    if (basis->max_degree() == nMax) maxEntry = c.entries().cwiseAbs().maxCoeff();
    return c;
  };
  out.probe = compactness_probe(factory, t, 1, ladder, radii, opts);
  out.maxEntry = maxEntry;
  return out;
}

SlowOscillationVerdict slow_oscillation_equivalence(const Symbol& f, double t, const std::vector<double>& radii,
                                                    const std::vector<int>& ladder,
                                                    const std::vector<double>& probeRadii) {
  SlowOscillationVerdict out;
  out.slowCheck = check_tag(f, SymbolTag::SlowlyOscillating, radii, 1);
  out.symbolTail = check_tag(f, SymbolTag::C0, radii, 1);
  out.heatTail = check_tag(heat_symbol(f, t, 1), SymbolTag::C0, radii, 1);
  out.compactness = compactness_probe([&](const BasisPtr& b) { return toeplitz_matrix(f, b); }, t, 1, ladder,
                                      probeRadii);
  const bool a = out.symbolTail.passed, b = out.heatTail.passed, c = out.compactness.compact();
  out.agree = a == b && b == c;
  out.verdict = !out.agree ? "disagree" : (a ? "all-pass" : "all-fail");
  return out;
}

Symbol extend_boundary_symbol(const std::function<Complex(double)>& boundaryData, double cutoffRadius,
                              int fourierSamples) {
  if (!(cutoffRadius >= 0.0)) throw Error("extend_boundary_symbol: cutoff radius must be nonnegative");
  if (fourierSamples < 8) throw Error("extend_boundary_symbol: too few samples");
  const int M = fourierSamples;
  std::vector<Complex> samples(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) samples[static_cast<std::size_t>(j)] = boundaryData(2.0 * kPi * j / M);

  double scale = 0.0;
  for (const Complex& s : samples) scale = std::max(scale, std::abs(s));
  std::vector<std::pair<int, Complex>> harmonics;
  for (int m = -M / 2 + 1; m < M / 2; ++m) {
    Complex c = 0.0;
    for (int j = 0; j < M; ++j) c += samples[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * kPi * m * j / M);
    c /= static_cast<double>(M);
    if (std::abs(c) > 1e-15 * std::max(scale, 1.0)) harmonics.emplace_back(m, c);
  }
  if (harmonics.empty()) harmonics.emplace_back(0, Complex(0.0));

  double err = 0.0;
  for (int j = 0; j < 4 * M; ++j) {
    const double th = 2.0 * kPi * (j + 0.5) / (4 * M);
    Complex s = 0.0;
    for (const auto& [m, c] : harmonics) s += c * std::polar(1.0, m * th);
    err = std::max(err, std::abs(s - boundaryData(th)));
  }
  if (err > 1e-10 * std::max(scale, 1.0)) {
    throw Error("extend_boundary_symbol: boundary data not resolved by " + std::to_string(M) +
                " Fourier samples (error " + std::to_string(err) + "); discontinuous data is rejected");
  }
  return Symbol::angular(std::move(harmonics), cutoffRadius);
}

}  // namespace focklab
