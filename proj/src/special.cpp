#include "focklab/special.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

namespace focklab::special {

double log_factorial(int k) {
  if (k < 0) throw Error("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(k) + 1.0);
}

double log_binomial(int a, int b) {
  if (b < 0 || b > a) throw Error("log_binomial: out of range");
  return log_factorial(a) - log_factorial(b) - log_factorial(a - b);
}

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(a, x);
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(a, x);
}

double gamma_q_inv(double a, double q) {
  if (q >= 1.0) return 0.0;
  if (q <= 0.0) throw Error("gamma_q_inv: q must be positive");
  return boost::math::gamma_q_inv(a, q);
}

std::vector<double> laguerre_sequence(int kmax, double alpha, double x) {
  std::vector<double> l(static_cast<std::size_t>(std::max(kmax, 0) + 1));
  l[0] = 1.0;
  if (kmax >= 1) l[1] = 1.0 + alpha - x;
  for (int k = 1; k < kmax; ++k) {
    l[static_cast<std::size_t>(k + 1)] =
        ((2.0 * k + 1.0 + alpha - x) * l[static_cast<std::size_t>(k)] -
         (k + alpha) * l[static_cast<std::size_t>(k - 1)]) /
        (k + 1.0);
  }
  return l;
}

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

}  // namespace focklab::special
