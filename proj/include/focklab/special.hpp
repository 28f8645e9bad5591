#pragma once

#include <vector>

#include "focklab/core_types.hpp"

namespace focklab::special {

/// log(k!) via lgamma.
double log_factorial(int k);

/// log binomial(a, b).
double log_binomial(int a, int b);

/// Regularized lower / upper incomplete gamma P(a, x), Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Smallest x with Q(a, x) <= q.
double gamma_q_inv(double a, double q);

/// Generalized Laguerre values L_k^{(alpha)}(x) for k = 0..kmax by the
/// three-term recurrence.
std::vector<double> laguerre_sequence(int kmax, double alpha, double x);

/// C-infinity step: 0 for x <= 0, 1 for x >= 1, smooth in between.
double smooth_step(double x);

}  // namespace focklab::special
