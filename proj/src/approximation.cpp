#include "focklab/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/SVD>

#include "focklab/fock_core.hpp"
#include "focklab/quadrature.hpp"
#include "focklab/special.hpp"

namespace focklab {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string WienerSearchParams::canonical() const {
  std::ostringstream os;
  os << std::setprecision(17) << "ridge=" << ridge << ";sample=" << sampleSpacing << ";cert=" << certPanel << ";levels=";
  for (const WienerLevel& l : levels) os << '(' << l.h << ',' << l.L << ',' << l.K << ')';
  return os.str();
}

namespace {

// One real factor of g_s on C = R^2: g_s(x + iy) = g1(x, s) g1(y, s).
double g1(double x, double s) { return std::exp(-x * x / s) / std::sqrt(kPi * s); }

// Mass of the 1-D factor centered at a outside [-B, B].
double outside_1d(double a, double s, double B) {
  return 0.5 * std::erfc((B - a) / std::sqrt(s)) + 0.5 * std::erfc((B + a) / std::sqrt(s));
}

// Terms regrouped on the tensor grid of their distinct coordinates.
struct TensorTerms {
  std::vector<double> xs, ys;
  Eigen::MatrixXd C;  // C(i, j): coefficient at xs[i] + i ys[j]
};

TensorTerms to_tensor(const std::vector<WienerTerm>& terms) {
  std::map<double, int> xi, yi;
  for (const WienerTerm& w : terms) {
    xi.emplace(w.z[0].real(), 0);
    yi.emplace(w.z[0].imag(), 0);
  }
  TensorTerms tt;
  for (auto& [x, idx] : xi) {
    idx = static_cast<int>(tt.xs.size());
    tt.xs.push_back(x);
  }
  for (auto& [y, idx] : yi) {
    idx = static_cast<int>(tt.ys.size());
    tt.ys.push_back(y);
  }
  tt.C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tt.xs.size()), static_cast<Eigen::Index>(tt.ys.size()));
  for (const WienerTerm& w : terms) {
    if (w.c.imag() != 0.0) throw Error("wiener: complex coefficients are not supported by the certifier");
    tt.C(xi[w.z[0].real()], yi[w.z[0].imag()]) += w.c.real();
  }
  return tt;
}

double l1_on_rule(const TensorTerms& tt, double t, double s, const quad::Rule1D& rule) {
  const auto Q = static_cast<Eigen::Index>(rule.size());
  Eigen::MatrixXd Gx(Q, static_cast<Eigen::Index>(tt.xs.size()));
  Eigen::MatrixXd Gy(Q, static_cast<Eigen::Index>(tt.ys.size()));
  Eigen::VectorXd tgt(Q), w(Q);
  for (Eigen::Index i = 0; i < Q; ++i) {
    const double x = rule.nodes[static_cast<std::size_t>(i)];
    for (std::size_t p = 0; p < tt.xs.size(); ++p) Gx(i, static_cast<Eigen::Index>(p)) = g1(x - tt.xs[p], t);
    for (std::size_t p = 0; p < tt.ys.size(); ++p) Gy(i, static_cast<Eigen::Index>(p)) = g1(x - tt.ys[p], t);
    tgt(i) = g1(x, s);
    w(i) = rule.weights[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd GyCt = Gy * tt.C.transpose();  // Q x |xs|
  double total = 0.0;
  const Eigen::Index chunk = 256;
  for (Eigen::Index r0 = 0; r0 < Q; r0 += chunk) {
    const Eigen::Index rows = std::min(chunk, Q - r0);
    const Eigen::MatrixXd approx = Gx.middleRows(r0, rows) * GyCt.transpose();  // rows x Q (x by y)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double wi = w(r0 + i), ti = tgt(r0 + i);
      for (Eigen::Index j = 0; j < Q; ++j) total += wi * w(j) * std::abs(ti * tgt(j) - approx(i, j));
    }
  }
  return total;
}

L1Certificate certify(const TensorTerms& tt, double t, double s, double panel, double B) {
  const quad::Rule1D coarse = quad::composite_legendre(-B, B, {}, panel, 8);
  const quad::Rule1D fine = quad::composite_legendre(-B, B, {}, 0.5 * panel, 8);
  L1Certificate cert;
  const double c0 = l1_on_rule(tt, t, s, coarse);
  cert.value = l1_on_rule(tt, t, s, fine);
  cert.resolutionDiff = std::abs(cert.value - c0);
  auto outside = [&](double a, double b, double var) {
    const double ex = outside_1d(a, var, B), ey = outside_1d(b, var, B);
    return 1.0 - (1.0 - ex) * (1.0 - ey);
  };
  double tail = outside(0.0, 0.0, s);
  for (std::size_t i = 0; i < tt.xs.size(); ++i)
    for (std::size_t j = 0; j < tt.ys.size(); ++j) {
      const double c = std::abs(tt.C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      if (c != 0.0) tail += c * outside(tt.xs[i], tt.ys[j], t);
    }
  cert.tailBound = tail;
  return cert;
}

double certification_box(const TensorTerms& tt, double t) {
  double L = 0.0;
  for (double x : tt.xs) L = std::max(L, std::abs(x));
  for (double y : tt.ys) L = std::max(L, std::abs(y));
  return L + 7.0 * std::sqrt(t);
}

// phi(r) = (1/2pi) int_0^inf e^{(t - s) rho^2/4 - (rho/K)^8} J_0(rho r) rho drho: the
// band-limited inverse transform of ghat_s / ghat_t, ghat_s(xi) = e^{-s|xi|^2/4}.
std::vector<double> seed_profile(const std::vector<double>& radii, double t, double s, double K) {
  const quad::Rule1D rule = quad::composite_legendre(0.0, 2.0 * K, {}, K / 16.0, 16);
  std::vector<double> amp(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double rho = rule.nodes[i];
    amp[i] = rule.weights[i] * std::exp((t - s) * rho * rho / 4.0 - std::pow(rho / K, 8)) * rho / (2.0 * kPi);
  }
  std::vector<double> out(radii.size(), 0.0);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) acc += amp[i] * std::cyl_bessel_j(0.0, rule.nodes[i] * radii[k]);
    out[k] = acc;
  }
  return out;
}

// Ridge least squares min ||G C G^T - T||_F^2 + lambda ||C - C0||_F^2 with the
// separable target T = tau tau^T, solved in the singular basis of G.
Eigen::MatrixXd separable_ridge(const Eigen::MatrixXd& G, const Eigen::VectorXd& tau, const Eigen::MatrixXd& C0,
                                double lambda) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd& U = svd.matrixU();
  const Eigen::MatrixXd& V = svd.matrixV();
  const Eigen::VectorXd& S = svd.singularValues();
  const Eigen::VectorXd ut = U.transpose() * tau;
  const Eigen::MatrixXd c0 = V.transpose() * C0 * V;
  Eigen::MatrixXd ct(S.size(), S.size());
  for (Eigen::Index i = 0; i < S.size(); ++i)
    for (Eigen::Index j = 0; j < S.size(); ++j) {
      const double ss = S(i) * S(j);
      ct(i, j) = (ss * ut(i) * ut(j) + lambda * c0(i, j)) / (ss * ss + lambda);
    }
  return V * ct * V.transpose();
}

std::vector<WienerTerm> from_grid(const std::vector<double>& axis, const Eigen::MatrixXd& C) {
  std::vector<WienerTerm> out;
  for (std::size_t i = 0; i < axis.size(); ++i)
    for (std::size_t j = 0; j < axis.size(); ++j) {
      const double c = C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (c != 0.0) out.push_back({Complex(c), Point{Complex(axis[i], axis[j])}});
    }
  return out;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

L1Certificate wiener_l1_certificate(const WienerApproximant& w, double panel) {
  if (w.n != 1) throw Error("wiener_l1_certificate: only n = 1 is implemented");
  const TensorTerms tt = to_tensor(w.coeffs);
  return certify(tt, w.t, w.t / w.N, panel * std::sqrt(w.t), certification_box(tt, w.t));
}

std::string wiener_to_text(const WienerApproximant& w, const std::string& key) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# focklab-wiener v1\n";
  os << "key=" << key << "\n";
  os << "t=" << w.t << "\nN=" << w.N << "\nn=" << w.n << "\nlevel=" << w.level << "\n";
  os << "l1Error=" << w.l1Error << "\nquadratureValue=" << w.quadratureValue << "\nresolutionDiff=" << w.resolutionDiff
     << "\ntailBound=" << w.tailBound << "\nseedL1Error=" << w.seedL1Error << "\ncertified=" << (w.certified ? 1 : 0)
     << "\nterms=" << w.coeffs.size() << "\n";
  for (const WienerTerm& term : w.coeffs)
    os << term.c.real() << ',' << term.c.imag() << ',' << term.z[0].real() << ',' << term.z[0].imag() << '\n';
  return os.str();
}

WienerApproximant wiener_from_text(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "# focklab-wiener v1") throw Error("wiener cache: bad header");
  std::map<std::string, std::string> kv;
  std::size_t terms = 0;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("wiener cache: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
    if (line.substr(0, eq) == "terms") {
      terms = std::stoul(line.substr(eq + 1));
      break;
    }
  }
  for (const char* req : {"key", "t", "N", "n", "level", "l1Error", "quadratureValue", "resolutionDiff", "tailBound",
                          "seedL1Error", "certified", "terms"}) {
    if (!kv.count(req)) throw Error(std::string("wiener cache: missing field ") + req);
  }
  if (kv["key"] != key) throw Error("wiener cache: key mismatch");
  WienerApproximant w;
  w.t = std::stod(kv["t"]);
  w.N = std::stoi(kv["N"]);
  w.n = std::stoi(kv["n"]);
  w.level = std::stoi(kv["level"]);
  w.l1Error = std::stod(kv["l1Error"]);
  w.quadratureValue = std::stod(kv["quadratureValue"]);
  w.resolutionDiff = std::stod(kv["resolutionDiff"]);
  w.tailBound = std::stod(kv["tailBound"]);
  w.seedL1Error = std::stod(kv["seedL1Error"]);
  w.certified = kv["certified"] == "1";
  for (std::size_t i = 0; i < terms; ++i) {
    if (!std::getline(in, line)) throw Error("wiener cache: truncated term list");
    std::istringstream row(line);
    double v[4];
    char comma;
    row >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3];
    if (!row) throw Error("wiener cache: malformed term '" + line + "'");
    w.coeffs.push_back({Complex(v[0], v[1]), Point{Complex(v[2], v[3])}});
  }
  w.fromCache = true;
  return w;
}

WienerApproximant wiener_coefficients(double t, int N, const WienerSearchParams& params) {
  if (N < 1) throw Error("wiener_coefficients: N must be >= 1");
  if (!(t > 0.0)) throw Error("wiener_coefficients: t must be positive");
  WienerApproximant best;
  best.t = t;
  best.N = N;
  if (N == 1) {
    best.coeffs = {{Complex(1.0), Point{Complex(0.0)}}};
    best.certified = true;
    return best;
  }
  std::ostringstream keySrc;
  keySrc << std::setprecision(17) << "t=" << t << ";N=" << N << ";n=1;" << params.canonical();
  const std::string key = hex64(fnv1a64(keySrc.str()));
  std::filesystem::path cachePath;
  if (!params.cacheDir.empty()) {
    cachePath = std::filesystem::path(params.cacheDir) / ("wiener-" + key + ".txt");
    if (std::filesystem::exists(cachePath)) {
      std::ifstream in(cachePath);
      std::stringstream buf;
      buf << in.rdbuf();
      return wiener_from_text(buf.str(), key);
    }
  }

  const double s = t / N;
  const double st = std::sqrt(t);
  double bestTotal = std::numeric_limits<double>::infinity();
  for (std::size_t lv = 0; lv < params.levels.size(); ++lv) {
    const WienerLevel& level = params.levels[lv];
    const double h = level.h * st;
    const int half = static_cast<int>(std::lround(level.L / level.h));
    std::vector<double> axis;
    for (int i = -half; i <= half; ++i) axis.push_back(i * h);
    const auto P = static_cast<Eigen::Index>(axis.size());

    // seed
    std::vector<double> radii;
    for (double x : axis)
      for (double y : axis) radii.push_back(std::hypot(x, y));
    const std::vector<double> phi = seed_profile(radii, t, s, level.K / st);
    Eigen::MatrixXd C0(P, P);
    for (Eigen::Index i = 0; i < P; ++i)
      for (Eigen::Index j = 0; j < P; ++j) C0(i, j) = h * h * phi[static_cast<std::size_t>(i * P + j)];

    // least squares refinement on a sample grid
    const double B = axis.back() + 6.0 * st;
    const double hs = params.sampleSpacing * st;
    std::vector<double> pts;
    for (double x = -B; x <= B + 1e-12; x += hs) pts.push_back(x);
    Eigen::MatrixXd G(static_cast<Eigen::Index>(pts.size()), P);
    Eigen::VectorXd tau(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (Eigen::Index p = 0; p < P; ++p) G(static_cast<Eigen::Index>(i), p) = g1(pts[i] - axis[static_cast<std::size_t>(p)], t);
      tau(static_cast<Eigen::Index>(i)) = g1(pts[i], s);
    }
    const Eigen::MatrixXd C = separable_ridge(G, tau, C0, params.ridge);

    const TensorTerms seedTerms{axis, axis, C0};
    const TensorTerms lsqTerms{axis, axis, C};
    const double box = axis.back() + 7.0 * st;
    const L1Certificate seedCert = certify(seedTerms, t, s, params.certPanel * st, box);
    const L1Certificate cert = certify(lsqTerms, t, s, params.certPanel * st, box);
    const bool useSeed = seedCert.total() < cert.total();
    const L1Certificate& chosen = useSeed ? seedCert : cert;
    if (chosen.total() < bestTotal) {
      bestTotal = chosen.total();
      best.coeffs = from_grid(axis, useSeed ? C0 : C);
      best.l1Error = chosen.total();
      best.quadratureValue = chosen.value;
      best.resolutionDiff = chosen.resolutionDiff;
      best.tailBound = chosen.tailBound;
      best.seedL1Error = seedCert.total();
      best.level = static_cast<int>(lv);
      best.certified = chosen.total() <= 1.0 / N;
    }
    if (best.certified) break;
  }
  if (!cachePath.empty()) {
    std::filesystem::create_directories(cachePath.parent_path());
    std::ofstream out(cachePath);
    out << wiener_to_text(best, key);
  }
  return best;
}

Symbol wiener_weight(const WienerApproximant& w) {
  std::vector<Symbol> parts;
  const Symbol g = heat_kernel(w.t, w.n);
  for (const WienerTerm& term : w.coeffs) parts.push_back(g.translate(term.z).scaled(term.c));
  return Symbol::sum(std::move(parts));
}

// ---------------------------------------------------------------------------

Reconstruction reconstruct(const OperatorFactory& a, const Symbol& berezinOfA, const WienerApproximant& w,
                           const BasisPtr& basis) {
  if (basis->n() != w.n || basis->t() != w.t) throw Error("reconstruct: basis does not match the approximant");
  const int N = basis->max_degree();
  const int pad = std::max(4, N / 2);
  std::vector<Symbol> parts;
  for (const WienerTerm& term : w.coeffs) parts.push_back(berezinOfA.translate(term.z).scaled(term.c));
  const Symbol F = Symbol::sum(std::move(parts));
  const OperatorMatrix A = a(basis);
  Reconstruction res{toeplitz_matrix(F, basis), 0, 0, 0, 0, 0, false};
  res.distance = half_block_distance(A, res.matrix);
  res.fullDistance = spectral_norm(A.entries() - res.matrix.entries());
  const OperatorMatrix heat = module_conv_padded(heat_kernel(w.t / w.N, w.n), a, basis, pad);
  res.heatDistance = half_block_distance(A, heat);
  res.wienerTerm = w.l1Error * spectral_norm(A.entries());
  const BasisPtr bigger = MultiIndexBasis::make(basis->t(), basis->n(), N + pad);
  const OperatorMatrix again = restrict_to(toeplitz_matrix(F, bigger), basis);
  res.truncationTerm = half_block_distance(again, res.matrix);
  const double slack = 1e-9 * (1.0 + spectral_norm(A.entries()));
  res.chainHolds = res.distance <= res.heatDistance + res.wienerTerm + res.truncationTerm + slack;
  return res;
}

// ---------------------------------------------------------------------------

T0Operator t0_build(double s, double t, const BasisPtr& basis, NormExponent p) {
  if (!(t > 0.0)) throw Error("t0_build: t must be positive");
  if (!(s > 0.5 * t)) throw Error("t0_build: requires s > t/2 (the series diverges otherwise)");
  const int n = basis->n();
  const int N = basis->max_degree();
  const double q = 1.0 - t / s;
  T0Operator op{s, t, p, OperatorMatrix::zero(basis), 0.0, {}, 1.0};
  Eigen::VectorXcd diag(basis->dim());
  for (Eigen::Index i = 0; i < basis->dim(); ++i) {
    const int k = basis->degree_of(i);
    diag(i) = k == 0 ? 1.0 : std::pow(q, k);
  }
  op.matrix = OperatorMatrix(basis, diag.asDiagonal());
  const NormExponent pq = conjugate(p);
  double sup = 0.0;
  for (int k = 0; k <= N; ++k) sup = std::max(sup, basis_norm_1d(p, k) * basis_norm_1d(pq, k));
  op.supProduct = sup;
  const double aq = std::abs(q);
  double partial = 0.0;
  for (int k = 0; k <= N; ++k) {
    const double term = (k == 0 ? 1.0 : std::pow(aq, k)) * std::exp(special::log_binomial(k - 1 + n, k)) * sup;
    partial += term;
    op.partialSums.push_back(partial);
  }
  const double closed = sup * std::pow(1.0 - aq, -static_cast<double>(n));
  op.nuclearNormBound = std::max(closed, partial);
  return op;
}

TraceIdentity trace_heat_identity(const Symbol& f, double s, const Point& z, const BasisPtr& basis) {
  const double t = basis->t();
  const int n = basis->n();
  if (!(s > 0.5 * t && s <= t)) throw Error("trace_heat_identity: requires t/2 < s <= t");
  TraceIdentity res;
  res.lhs = heat_transform(f, s, z).value;
  const T0Operator t0 = t0_build(s, t, basis);
  const OperatorMatrix tf = toeplitz_matrix(f, basis);
  const OperatorMatrix shifted = shift(tf, -z);
  Complex tr = 0.0;
  for (Eigen::Index i = 0; i < basis->dim(); ++i) tr += t0.matrix(i, i) * shifted(i, i);
  res.rhs = std::pow(t / s, n) * tr;
  res.gap = std::abs(res.lhs - res.rhs);
  const double aq = std::abs(1.0 - t / s);
  double tail = 0.0;
  for (int k = basis->max_degree() + 1; k < basis->max_degree() + 2000; ++k) {
    const double term = std::exp(k * std::log(std::max(aq, 1e-300)) + special::log_binomial(k - 1 + n, k));
    tail += term;
    if (term < 1e-18 * std::max(tail, 1e-300)) break;
  }
  res.truncationTail = std::pow(t / s, n) * f.bound() * tail;
  return res;
}

// ---------------------------------------------------------------------------

BergerCoburnRatio berger_coburn_forward(const Symbol& f, double s, const BasisPtr& basis, NormExponent p) {
  const double t = basis->t();
  if (!(s > 0.0 && s < 0.5 * t)) throw Error("berger_coburn_forward: requires 0 < s < t/2");
  BergerCoburnRatio r;
  r.norm = norm_estimate(toeplitz_matrix(f, basis), p);
  r.heatSup = heat_sup(f, s, basis->n());
  r.ratio = r.heatSup > 0.0 ? r.norm.upper / r.heatSup : std::numeric_limits<double>::infinity();
  return r;
}

BergerCoburnRatio berger_coburn_reverse(const Symbol& f, double s, const BasisPtr& basis, NormExponent p) {
  const double t = basis->t();
  if (!(s > 0.5 * t && s < 2.0 * t)) throw Error("berger_coburn_reverse: requires t/2 < s < 2t");
  BergerCoburnRatio r;
  r.norm = norm_estimate(toeplitz_matrix(f, basis), p);
  r.heatSup = heat_sup(f, s, basis->n());
  r.ratio = r.norm.lower > 0.0 ? r.heatSup / r.norm.lower : std::numeric_limits<double>::infinity();
  return r;
}

// ---------------------------------------------------------------------------

MembershipVerdict correspondence_membership(const Symbol& f, SymbolTag tag, double s, double t,
                                            const MembershipOptions& opts) {
  if (tag != SymbolTag::C0 && tag != SymbolTag::VanishingOscillation && tag != SymbolTag::BUC) {
    throw Error("correspondence_membership: tag must be C0, VO or BUC");
  }
  MembershipVerdict v;
  v.tag = tag;
  std::vector<double> radii = opts.radii;
  if (radii.empty()) {
    radii = tag == SymbolTag::C0 ? std::vector<double>{2, 4, 6, 8} : std::vector<double>{10, 40, 160};
  }
  const Symbol heat = heat_symbol(f, s, 1);
  v.heatCheck = check_tag(heat, tag, radii, 1);
  const BasisPtr basis = MultiIndexBasis::make(t, 1, opts.maxDegree);
  const OperatorFactory tf = [f](const BasisPtr& b) { return toeplitz_matrix(f, b); };
  const OperatorMatrix lhs = module_conv_padded(heat_kernel(s, 1), tf, basis, opts.maxDegree / 2);
  const OperatorMatrix rhs = toeplitz_matrix(heat, basis);
  const double scale = std::max(spectral_norm(rhs.half_block()), 1e-300);
  v.convolutionError = half_block_distance(lhs, rhs) / scale;
  v.convolutionPassed = v.convolutionError <= opts.tolerance;
  if (v.heatCheck.passed && v.convolutionPassed) {
    v.verdict = "member-consistent";
  } else if (!v.heatCheck.passed && v.convolutionPassed) {
    v.verdict = "heat-transform-fails-" + to_string(tag);
  } else if (v.heatCheck.passed) {
    v.verdict = "convolution-identity-fails";
  } else {
    v.verdict = "both-proxies-fail";
  }
  return v;
}

}  // namespace focklab
