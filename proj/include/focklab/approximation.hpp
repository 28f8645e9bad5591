#pragma once

#include <string>
#include <vector>

#include "focklab/basis.hpp"
#include "focklab/core_types.hpp"
#include "focklab/operators.hpp"
#include "focklab/symbols.hpp"

namespace focklab {

// ---------------------------------------------------------------------------
// Approximating a narrow Gaussian by translates of a wider one

/// One grid of translates: spacing h and half-width L (units of sqrt(t)),
/// frequency cutoff K (units of 1/sqrt(t)) for the deconvolution seed.
struct WienerLevel {
  double h = 0.4;
  double L = 4.0;
  double K = 5.0;
};

struct WienerSearchParams {
  /// Tried in order until the certified error reaches 1/N.
  std::vector<WienerLevel> levels{{0.4, 4.0, 5.0}, {0.35, 5.0, 6.0}, {0.3, 5.0, 7.0}, {0.25, 6.0, 8.0}};
  /// Ridge weight pulling the least-squares solution towards the seed.
  double ridge = 1e-10;
  /// Sample spacing of the least-squares surrogate (units of sqrt(t)).
  double sampleSpacing = 0.05;
  /// Panel width of the coarse certification rule (units of sqrt(t)); the
  /// fine rule halves it.
  double certPanel = 0.1;
  /// Directory for the coefficient cache; empty disables caching.
  std::string cacheDir;

  /// Stable text form of the parameters that determine the result.
  std::string canonical() const;
};

struct WienerTerm {
  Complex c{0.0};
  Point z;
};

struct WienerApproximant {
  double t = 1.0;
  int N = 1;
  int n = 1;
  std::vector<WienerTerm> coeffs;
  /// Certified ||g_{t/N} - sum_j c_j g_t(. - z_j)||_{L^1}: quadrature value
  /// plus resolution difference plus analytic tail.
  double l1Error = 0.0;
  double quadratureValue = 0.0;
  double resolutionDiff = 0.0;
  double tailBound = 0.0;
  /// Certified error of the deconvolution seed at the accepted level.
  double seedL1Error = 0.0;
  int level = -1;
  bool certified = false;
  bool fromCache = false;
};

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(const std::string& s);

/// Coefficients c_j at grid points z_j with ||g_{t/N} - sum c_j g_t(. - z_j)||_1
/// certified <= 1/N. Each level seeds the coefficients by dividing Gaussian
/// Fourier transforms under a smooth frequency cutoff, refines them by ridge
/// least squares on a sample grid, and certifies the L^1 error by tensor
/// Gauss-Legendre at two resolutions plus an analytic tail. When no level
/// reaches 1/N the best result is returned with certified = false.
/// Implemented for n = 1.
WienerApproximant wiener_coefficients(double t, int N, const WienerSearchParams& params = {});

/// Independent L^1 certification of an approximant (same quantities as
/// stored in the approximant).
struct L1Certificate {
  double value = 0.0;
  double resolutionDiff = 0.0;
  double tailBound = 0.0;
  double total() const { return value + resolutionDiff + tailBound; }
};
L1Certificate wiener_l1_certificate(const WienerApproximant& w, double panel);

std::string wiener_to_text(const WienerApproximant& w, const std::string& key);
/// Throws on malformed input or key mismatch.
WienerApproximant wiener_from_text(const std::string& text, const std::string& key);

/// sum_j c_j g_t(. - z_j) as a Gaussian-type symbol.
Symbol wiener_weight(const WienerApproximant& w);

// ---------------------------------------------------------------------------
// Reconstruction from the Berezin transform

struct Reconstruction {
  OperatorMatrix matrix;
  /// ||A - reconstruction||_2 on the degree <= N/2 block and the full block.
  double distance = 0.0;
  double fullDistance = 0.0;
  /// ||A - g_{t/N} * A||_2 on the half block (working-basis convolution).
  double heatDistance = 0.0;
  /// l1Error(N) ||A||_2
  double wienerTerm = 0.0;
  /// Half-block change of the reconstruction when the truncation grows by N/2.
  double truncationTerm = 0.0;
  /// distance <= heatDistance + wienerTerm + truncationTerm
  bool chainHolds = false;
};

/// sum_j c_j alpha_{z_j}(T_{A~}) for the Berezin symbol A~ of A (given as a
/// symbol). Uses alpha_z(T_f) = T_{alpha_z f}: the sum is assembled as one
/// Toeplitz matrix of sum_j c_j A~(. - z_j), which avoids conjugating a
/// truncated matrix by large shifts.
Reconstruction reconstruct(const OperatorFactory& a, const Symbol& berezinOfA, const WienerApproximant& w,
                           const BasisPtr& basis);

// ---------------------------------------------------------------------------
// The nuclear operator T_0^{(s)} and the trace identity

struct T0Operator {
  double s = 0.0;
  double t = 0.0;
  NormExponent p = NormExponent::Two;
  OperatorMatrix matrix;
  /// sum_{k <= N} |1 - t/s|^k binom(k-1+n, k) sup_alpha ||e_alpha||_p ||e_alpha||_q
  /// plus the remaining geometric tail.
  double nuclearNormBound = 0.0;
  /// Partial sums of the bound series, k = 0..N.
  std::vector<double> partialSums;
  /// sup_alpha ||e_alpha||_p ||e_alpha||_q
  double supProduct = 1.0;
};

/// Diagonal (1 - t/s)^{|alpha|}. Requires s > t/2.
T0Operator t0_build(double s, double t, const BasisPtr& basis, NormExponent p = NormExponent::Two);

struct TraceIdentity {
  Complex lhs{0.0};
  Complex rhs{0.0};
  double gap = 0.0;
  /// (t/s)^n sup|f| sum_{k > N} |1 - t/s|^k binom(k-1+n, k)
  double truncationTail = 0.0;
};

/// lhs = f^(s)(z); rhs = (t/s)^n tr(T_0^{(s)} alpha_{-z}(T_f)) on the truncation.
/// Requires t/2 < s <= t.
TraceIdentity trace_heat_identity(const Symbol& f, double s, const Point& z, const BasisPtr& basis);

// ---------------------------------------------------------------------------
// Norm comparisons with heat transforms

struct BergerCoburnRatio {
  NormEstimate norm;
  double heatSup = 0.0;
  double ratio = 0.0;
};

/// ||T_f||.upper / sup|f^(s)| for 0 < s < t/2.
BergerCoburnRatio berger_coburn_forward(const Symbol& f, double s, const BasisPtr& basis,
                                        NormExponent p = NormExponent::Two);
/// sup|f^(s)| / ||T_f||.lower for t/2 < s < 2t.
BergerCoburnRatio berger_coburn_reverse(const Symbol& f, double s, const BasisPtr& basis,
                                        NormExponent p = NormExponent::Two);

// ---------------------------------------------------------------------------
// Membership proxies

struct MembershipVerdict {
  SymbolTag tag = SymbolTag::C0;
  /// The heat transform passes the tag check.
  TagCheck heatCheck;
  /// Relative half-block error of g_s * T_f against T_{f^(s)}.
  double convolutionError = 0.0;
  bool convolutionPassed = false;
  /// "member-consistent" when both proxies pass, otherwise names the failure.
  std::string verdict;
};

struct MembershipOptions {
  std::vector<double> radii;  // empty: chosen from the tag
  double tolerance = 1e-3;
  int maxDegree = 16;
};

/// Checks that f^(s) passes the tag check for `tag` (C0, VO or BUC) and that
/// g_s * T_f = T_{f^(s)} holds on the truncation.
MembershipVerdict correspondence_membership(const Symbol& f, SymbolTag tag, double s, double t,
                                            const MembershipOptions& opts = {});

}  // namespace focklab
