#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "focklab/core_types.hpp"

namespace focklab {

using MultiIndex = std::array<int, kMaxDimension>;

inline int degree(const MultiIndex& a, int n) {
  int d = 0;
  for (int i = 0; i < n; ++i) d += a[static_cast<std::size_t>(i)];
  return d;
}

/// Truncated monomial basis e_alpha(z) = z^alpha / sqrt(t^|alpha| alpha!) of
/// the Fock space, |alpha| <= maxDegree, in graded-lexicographic order:
/// ascending total degree, and within one degree descending lexicographic
/// (for n = 2: (2,0), (1,1), (0,2)). For n = 1 position k holds e_k.
class MultiIndexBasis {
 public:
  MultiIndexBasis(double t, int n, int maxDegree);

  static std::shared_ptr<const MultiIndexBasis> make(double t, int n, int maxDegree) {
    return std::make_shared<const MultiIndexBasis>(t, n, maxDegree);
  }

  double t() const { return t_; }
  int n() const { return n_; }
  int max_degree() const { return max_degree_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(indices_.size()); }

  const MultiIndex& index(Eigen::Index i) const { return indices_[static_cast<std::size_t>(i)]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  int degree_of(Eigen::Index i) const { return degrees_[static_cast<std::size_t>(i)]; }

  /// Position of alpha, or -1 when |alpha| > maxDegree.
  Eigen::Index position(const MultiIndex& alpha) const;

  /// Number of basis elements with |alpha| <= d (the leading block size).
  Eigen::Index block_size(int d) const;

  /// Same (n, maxDegree) at a different scale t.
  std::shared_ptr<const MultiIndexBasis> rescaled(double t) const {
    return make(t, n_, max_degree_);
  }

  /// Evaluates e_alpha(z) for every basis element.
  Eigen::VectorXcd evaluate(const Point& z) const;

  /// Evaluates e_alpha(z) exp(-|z|^2/2t), overflow-safe for large |z|.
  Eigen::VectorXcd evaluate_weighted(const Point& z) const;

  bool same_as(const MultiIndexBasis& o) const {
    return t_ == o.t_ && n_ == o.n_ && max_degree_ == o.max_degree_;
  }

 private:
  std::int64_t key(const MultiIndex& a) const;

  double t_;
  int n_;
  int max_degree_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degrees_;
  std::unordered_map<std::int64_t, Eigen::Index> lookup_;
};

using BasisPtr = std::shared_ptr<const MultiIndexBasis>;

/// Element of the truncated space, coefficients w.r.t. e_alpha.
struct TruncatedVector {
  BasisPtr basis;
  Eigen::VectorXcd coeffs;

  TruncatedVector(BasisPtr b, Eigen::VectorXcd c);
  explicit TruncatedVector(BasisPtr b);

  /// Pointwise value f(z) = sum_alpha c_alpha e_alpha(z).
  Complex operator()(const Point& z) const;
};

/// Dense matrix of an operator on the truncated space with the fixed
/// convention entries(beta, alpha) = <A e_alpha, e_beta>.
class OperatorMatrix {
 public:
  OperatorMatrix(BasisPtr basis, Eigen::MatrixXcd entries);

  static OperatorMatrix identity(BasisPtr basis);
  static OperatorMatrix zero(BasisPtr basis);

  const BasisPtr& basis() const { return basis_; }
  const MultiIndexBasis& basis_ref() const { return *basis_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }

  Complex operator()(Eigen::Index beta, Eigen::Index alpha) const { return entries_(beta, alpha); }

  TruncatedVector apply(const TruncatedVector& v) const;

  /// Leading block over degrees <= d.
  Eigen::MatrixXcd block(int d) const;
  /// Leading block over degrees <= maxDegree/2, where comparisons are made.
  Eigen::MatrixXcd half_block() const { return block(basis_->max_degree() / 2); }

  OperatorMatrix adjoint() const { return {basis_, entries_.adjoint()}; }

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(Complex s, const OperatorMatrix& a);

 private:
  BasisPtr basis_;
  Eigen::MatrixXcd entries_;
};

void require_same_basis(const MultiIndexBasis& a, const MultiIndexBasis& b, const char* where);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& m);

/// Spectral norm of the difference over the degree <= maxDegree/2 block.
double half_block_distance(const OperatorMatrix& a, const OperatorMatrix& b);

}  // namespace focklab
