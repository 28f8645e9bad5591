#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>

namespace focklab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Largest complex dimension the fixed-capacity point type supports.
inline constexpr int kMaxDimension = 4;

/// Raised for precondition violations and for numerical certificates that
/// cannot be established (tail bounds, quadrature residuals, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point of C^n stored inline (n <= kMaxDimension), so symbol evaluation
/// in hot quadrature loops never allocates.
class Point {
 public:
  Point() = default;

  explicit Point(int n) : n_(n) {
    if (n < 1 || n > kMaxDimension) {
      throw Error("Point: dimension must be in [1, " + std::to_string(kMaxDimension) + "]");
    }
  }

  Point(std::initializer_list<Complex> coords) : Point(static_cast<int>(coords.size())) {
    int i = 0;
    for (const Complex& c : coords) c_[i++] = c;
  }

  static Point zero(int n) { return Point(n); }

  int dim() const { return n_; }
  Complex& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  const Complex& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }

  /// |z|^2
  double norm2() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::norm(c_[i]);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  Point& operator+=(const Point& o) {
    check_same(o);
    for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    check_same(o);
    for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(Complex s) {
    for (int i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Complex s, Point a) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= Complex(s, 0.0); }
  friend Point operator-(Point a) { return a *= Complex(-1.0, 0.0); }

  /// Sesquilinear product w . conj(z) = sum_j w_j conj(z_j).
  friend Complex dot(const Point& w, const Point& z) {
    w.check_same(z);
    Complex s = 0.0;
    for (int i = 0; i < w.n_; ++i) s += w.c_[i] * std::conj(z.c_[i]);
    return s;
  }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.n_ != b.n_) return false;
    for (int i = 0; i < a.n_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  void check_same(const Point& o) const {
    if (o.n_ != n_) throw Error("Point: dimension mismatch");
  }

  std::array<Complex, kMaxDimension> c_{};
  int n_ = 0;
};

/// Norm exponents supported by the truncated model. LittleInfinity shares
/// all numerics with Infinity (it only changes which space is meant).
enum class NormExponent { One, Two, Infinity, LittleInfinity };

std::string to_string(NormExponent p);
NormExponent norm_exponent_from_string(const std::string& s);

/// Conjugate exponent with respect to the F^2 pairing.
NormExponent conjugate(NormExponent p);

struct FockParams {
  double t = 1.0;
  int n = 1;
  NormExponent p = NormExponent::Two;

  FockParams() = default;
  FockParams(double t_, int n_, NormExponent p_ = NormExponent::Two) : t(t_), n(n_), p(p_) {
    validate();
  }

  void validate() const {
    if (!(t > 0.0)) throw Error("FockParams: t must be positive");
    if (n < 1 || n > kMaxDimension) {
      throw Error("FockParams: n must be in [1, " + std::to_string(kMaxDimension) + "]");
    }
  }
};

}  // namespace focklab
