#include "focklab/basis.hpp"

#include <cmath>
#include <functional>

#include "focklab/special.hpp"

namespace focklab {

namespace {

void enumerate_degree(int n, int d, std::vector<MultiIndex>& out) {
  MultiIndex cur{};
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == n - 1) {
      cur[static_cast<std::size_t>(pos)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      cur[static_cast<std::size_t>(pos)] = a;
      rec(pos + 1, remaining - a);
    }
  };
  rec(0, d);
}

// Per-coordinate tables of log|z_j^k / sqrt(t^k k!)| and k*arg(z_j).
struct CoordinateTable {
  std::vector<double> logmag;
  std::vector<double> phase;
  bool zero = false;
};

CoordinateTable coordinate_table(Complex zj, double t, int maxDegree) {
  CoordinateTable tab;
  tab.logmag.resize(static_cast<std::size_t>(maxDegree + 1));
  tab.phase.resize(static_cast<std::size_t>(maxDegree + 1));
  const double r = std::abs(zj);
  tab.zero = (r == 0.0);
  const double lr = tab.zero ? 0.0 : std::log(r);
  const double th = tab.zero ? 0.0 : std::arg(zj);
  const double lt = std::log(t);
  for (int k = 0; k <= maxDegree; ++k) {
    tab.logmag[static_cast<std::size_t>(k)] =
        k * lr - 0.5 * k * lt - 0.5 * special::log_factorial(k);
    tab.phase[static_cast<std::size_t>(k)] = k * th;
  }
  return tab;
}

}  // namespace

MultiIndexBasis::MultiIndexBasis(double t, int n, int maxDegree)
    : t_(t), n_(n), max_degree_(maxDegree) {
  FockParams(t, n).validate();
  if (maxDegree < 0) throw Error("MultiIndexBasis: maxDegree must be nonnegative");
  for (int d = 0; d <= maxDegree; ++d) {
    const std::size_t before = indices_.size();
    enumerate_degree(n, d, indices_);
    degrees_.insert(degrees_.end(), indices_.size() - before, d);
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    lookup_.emplace(key(indices_[i]), static_cast<Eigen::Index>(i));
  }
}

std::int64_t MultiIndexBasis::key(const MultiIndex& a) const {
  std::int64_t k = 0;
  for (int i = 0; i < n_; ++i) k = k * (max_degree_ + 1) + a[static_cast<std::size_t>(i)];
  return k;
}

Eigen::Index MultiIndexBasis::position(const MultiIndex& alpha) const {
  int d = 0;
  for (int i = 0; i < n_; ++i) {
    if (alpha[static_cast<std::size_t>(i)] < 0) return -1;
    d += alpha[static_cast<std::size_t>(i)];
  }
  if (d > max_degree_) return -1;
  auto it = lookup_.find(key(alpha));
  return it == lookup_.end() ? -1 : it->second;
}

Eigen::Index MultiIndexBasis::block_size(int d) const {
  if (d < 0) return 0;
  if (d >= max_degree_) return dim();
  // Count of multi-indices with |alpha| <= d is binomial(d + n, n).
  return static_cast<Eigen::Index>(
      std::llround(std::exp(special::log_binomial(d + n_, n_))));
}

Eigen::VectorXcd MultiIndexBasis::evaluate_weighted(const Point& z) const {
  if (z.dim() != n_) throw Error("MultiIndexBasis::evaluate_weighted: dimension mismatch");
  std::array<CoordinateTable, kMaxDimension> tabs;
  for (int j = 0; j < n_; ++j) tabs[static_cast<std::size_t>(j)] = coordinate_table(z[j], t_, max_degree_);
  const double gauss = -z.norm2() / (2.0 * t_);
  Eigen::VectorXcd out(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    const MultiIndex& a = indices_[static_cast<std::size_t>(i)];
    double lm = gauss;
    double ph = 0.0;
    bool vanish = false;
    for (int j = 0; j < n_; ++j) {
      const auto& tab = tabs[static_cast<std::size_t>(j)];
      const int k = a[static_cast<std::size_t>(j)];
      if (tab.zero && k > 0) {
        vanish = true;
        break;
      }
      lm += tab.logmag[static_cast<std::size_t>(k)];
      ph += tab.phase[static_cast<std::size_t>(k)];
    }
    out(i) = vanish ? Complex(0.0) : std::polar(std::exp(lm), ph);
  }
  return out;
}

Eigen::VectorXcd MultiIndexBasis::evaluate(const Point& z) const {
  return evaluate_weighted(z) * std::exp(z.norm2() / (2.0 * t_));
}

TruncatedVector::TruncatedVector(BasisPtr b, Eigen::VectorXcd c) : basis(std::move(b)), coeffs(std::move(c)) {
  if (!basis) throw Error("TruncatedVector: null basis");
  if (coeffs.size() != basis->dim()) throw Error("TruncatedVector: coefficient length != basis dimension");
}

TruncatedVector::TruncatedVector(BasisPtr b) : basis(std::move(b)) {
  if (!basis) throw Error("TruncatedVector: null basis");
  coeffs = Eigen::VectorXcd::Zero(basis->dim());
}

Complex TruncatedVector::operator()(const Point& z) const {
  return (basis->evaluate(z).array() * coeffs.array()).sum();
}

OperatorMatrix::OperatorMatrix(BasisPtr basis, Eigen::MatrixXcd entries)
    : basis_(std::move(basis)), entries_(std::move(entries)) {
  if (!basis_) throw Error("OperatorMatrix: null basis");
  if (entries_.rows() != basis_->dim() || entries_.cols() != basis_->dim()) {
    throw Error("OperatorMatrix: matrix must be square with basis dimension");
  }
}

OperatorMatrix OperatorMatrix::identity(BasisPtr basis) {
  const Eigen::Index d = basis->dim();
  return {std::move(basis), Eigen::MatrixXcd::Identity(d, d)};
}

OperatorMatrix OperatorMatrix::zero(BasisPtr basis) {
  const Eigen::Index d = basis->dim();
  return {std::move(basis), Eigen::MatrixXcd::Zero(d, d)};
}

TruncatedVector OperatorMatrix::apply(const TruncatedVector& v) const {
  require_same_basis(*basis_, *v.basis, "OperatorMatrix::apply");
  return {basis_, entries_ * v.coeffs};
}

Eigen::MatrixXcd OperatorMatrix::block(int d) const {
  const Eigen::Index m = basis_->block_size(d);
  return entries_.topLeftCorner(m, m);
}

void require_same_basis(const MultiIndexBasis& a, const MultiIndexBasis& b, const char* where) {
  if (!a.same_as(b)) throw Error(std::string(where) + ": basis mismatch");
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(*a.basis_, *b.basis_, "operator+");
  return {a.basis_, a.entries_ + b.entries_};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(*a.basis_, *b.basis_, "operator-");
  return {a.basis_, a.entries_ - b.entries_};
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(*a.basis_, *b.basis_, "operator*");
  return {a.basis_, a.entries_ * b.entries_};
}

OperatorMatrix operator*(Complex s, const OperatorMatrix& a) { return {a.basis_, s * a.entries_}; }

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double half_block_distance(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a.basis_ref(), b.basis_ref(), "half_block_distance");
  return spectral_norm(a.half_block() - b.half_block());
}

std::string to_string(NormExponent p) {
  switch (p) {
    case NormExponent::One: return "1";
    case NormExponent::Two: return "2";
    case NormExponent::Infinity: return "inf";
    case NormExponent::LittleInfinity: return "little-inf";
  }
  return "?";
}

NormExponent norm_exponent_from_string(const std::string& s) {
  if (s == "1") return NormExponent::One;
  if (s == "2") return NormExponent::Two;
  if (s == "inf" || s == "infinity") return NormExponent::Infinity;
  if (s == "little-inf" || s == "little-infinity") return NormExponent::LittleInfinity;
  throw Error("unknown norm exponent '" + s + "' (expected 1, 2, inf, little-inf)");
}

NormExponent conjugate(NormExponent p) {
  switch (p) {
    case NormExponent::One: return NormExponent::Infinity;
    case NormExponent::Two: return NormExponent::Two;
    case NormExponent::Infinity:
    case NormExponent::LittleInfinity: return NormExponent::One;
  }
  return NormExponent::Two;
}

}  // namespace focklab
