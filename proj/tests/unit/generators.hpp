#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "focklab/basis.hpp"
#include "focklab/symbols.hpp"

namespace focklab::testing {

/// Seeded generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Complex complex(double radius) { return std::polar(uniform(0.0, radius), uniform(0.0, 2.0 * kPi)); }

  Point point(int n, double radius) {
    Point z(n);
    for (int j = 0; j < n; ++j) z[j] = complex(radius / std::sqrt(double(n)));
    return z;
  }

  /// Coefficients decaying like 1/(1 + degree), so evaluations stay O(1).
  TruncatedVector vector(const BasisPtr& basis, int maxDegree = -1) {
    TruncatedVector v(basis);
    for (Eigen::Index i = 0; i < basis->dim(); ++i) {
      const int d = basis->degree_of(i);
      if (maxDegree >= 0 && d > maxDegree) continue;
      v.coeffs(i) = complex(1.0) / double(1 + d);
    }
    return v;
  }

  /// A symbol from the closed-form families (n = 1), possibly translated.
  Symbol closed_symbol() {
    Symbol f;
    switch (integer(0, 4)) {
      case 0:
        f = Symbol::gaussian(uniform(0.3, 4.0));
        break;
      case 1:
        f = Symbol::poly_gaussian({complex(1.0), complex(0.5), complex(0.2)}, uniform(0.5, 3.0));
        break;
      case 2:
        f = Symbol::oscillatory(uniform(0.2, 3.0));
        break;
      case 3:
        f = Symbol::plane_wave(Point{complex(1.5)});
        break;
      default:
        f = Symbol::constant(complex(2.0));
        break;
    }
    if (integer(0, 1) == 1) f = f.translate(point(1, 1.0));
    return f.scaled(complex(1.0) + 0.5);
  }

  /// Any bounded n = 1 symbol, including the quadrature-only families.
  Symbol bounded_symbol() {
    switch (integer(0, 3)) {
      case 0:
        return Symbol::angular({{integer(-2, 2), complex(1.0)}}, uniform(0.5, 2.0));
      case 1:
        return Symbol::sin_sqrt();
      case 2:
        return Symbol::smooth_sign(Point{complex(1.0) + 0.2}, uniform(0.5, 2.0));
      default:
        return closed_symbol();
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace focklab::testing
