#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "focklab/basis.hpp"
#include "focklab/core_types.hpp"
#include "focklab/operators.hpp"
#include "focklab/symbols.hpp"

namespace focklab {

// ---------------------------------------------------------------------------
// Directional limits

/// The net r_i * direction, r_1 < ... < r_m (m >= 3), leaving every compact set.
struct DirectionApproximant {
  Point direction;
  std::vector<double> radii;
  double cauchyTol = 1e-6;

  DirectionApproximant(Point direction, std::vector<double> radii, double cauchyTol = 1e-6);
  /// n = 1 direction e^{i theta}.
  static DirectionApproximant angle(double theta, std::vector<double> radii, double cauchyTol = 1e-6);
  double theta() const { return std::arg(direction[0]); }
};

struct LimitOptions {
  /// Compact grid |w| <= wRadius used to test that the limit is constant in w.
  double wRadius = 1.0;
  int wRings = 3;
  int wAngles = 8;
  /// Largest spread over the w-grid at the last radius for a constant limit.
  double wTolerance = 1e-4;
};

struct LimitVerdict {
  /// Value at the last radius (the limit when converged).
  Complex value{0.0};
  /// Successive differences: symbols |f(w - r_i u) - f(w - r_{i-1} u)|,
  /// operators the half-block spectral norm between successive Toeplitz matrices.
  std::vector<double> profile;
  bool converged = false;
  /// max over the w-grid of |f(w' - r_m u) - value|
  double wSpread = 0.0;
  bool constantInW = false;
  /// Constant symbol when constantInW, otherwise the farthest translate.
  std::optional<Symbol> limitSymbol;
  std::optional<OperatorMatrix> limitOperator;
  std::string detail;
};

/// lim_i f(w - r_i u). Non-convergence is reported, not raised.
LimitVerdict limit_symbol(const Symbol& f, const DirectionApproximant& dir, const Point& w,
                          const LimitOptions& opts = {});

/// Toeplitz matrices of the translates f(. - r_i u), i.e. alpha_{r_i u}(T_f),
/// tested for Cauchy convergence on the half block. The limit operator is
/// the Toeplitz matrix of the limit symbol (constant limits give c Id).
LimitVerdict limit_operator(const Symbol& f, const DirectionApproximant& dir, const BasisPtr& basis,
                            const LimitOptions& opts = {});

// ---------------------------------------------------------------------------
// Essential spectrum of VO symbols

struct EssentialSpectrum {
  std::vector<double> thetas;
  std::vector<Complex> samples;
  /// Largest final Cauchy difference over the directions.
  double toleranceRadius = 0.0;
  TagCheck voCheck;
  /// "ok", "vo-check-failed", "unconverged-direction" or
  /// "radial VO with non-directional boundary".
  std::string status;
  bool ok() const { return status == "ok"; }
};

/// {lim f(-r e^{i theta})} over the direction grid (n = 1). VO is checked by
/// check_tag on voRadii first; any unconverged direction excludes the run.
EssentialSpectrum essential_spectrum_vo(const Symbol& f, const std::vector<double>& thetas,
                                        const std::vector<double>& radii = {1e2, 1e3, 1e4, 1e5, 1e6},
                                        const std::vector<double>& voRadii = {10.0, 40.0, 160.0});

/// M equally spaced angles in [0, 2 pi).
std::vector<double> angle_grid(int m);

// ---------------------------------------------------------------------------
// Fredholm witness

struct FredholmOptions {
  /// 1/(f - lambda) is used outside this radius, a constant inside.
  double patchRadius = 2.0;
  /// inf |f - lambda| outside the patch must stay above this.
  double patchMargin = 1e-2;
  /// Berezin tails are sampled on this many angles per circle.
  int circleSamples = 64;
};

struct FredholmWitness {
  Complex lambda{0.0};
  bool patched = false;
  /// Sampled inf |f - lambda| over patchRadius <= |z| <= 2 max R.
  double margin = 0.0;
  std::vector<double> radii;
  /// sup_{|z| = R} |D~(z)| for D = (T_f - lambda) B - Id.
  std::vector<double> tails;
  bool passed = false;
  std::string detail;
};

/// B = T_h with h = chi/(f - lambda) + (1 - chi)/(c - lambda), chi a smooth
/// cutoff at patchRadius and c = f(0); passes when the Berezin tail of the
/// defect D strictly decreases over radii.
FredholmWitness fredholm_witness(const Symbol& f, Complex lambda, const BasisPtr& basis,
                                 const std::vector<double>& radii, const FredholmOptions& opts = {});

// ---------------------------------------------------------------------------
// Compactness and commutators

struct CompactnessOptions {
  int kProbe = 40;
  /// sigma_k must be non-increasing over k = kProbe/4, kProbe/2, kProbe and
  /// sigma_kProbe <= svFraction sigma_0.
  double svFraction = 0.75;
  /// The Berezin tail must be strictly decreasing with last <= tailFraction first.
  double tailFraction = 0.9;
  /// Singular values below smallRelative sigma_0 are counted per ladder step.
  double smallRelative = 1e-6;
  int circleSamples = 64;
};

struct CompactnessProfile {
  std::vector<int> ladder;
  /// Singular values at the largest N, descending.
  Eigen::VectorXd singularValues;
  /// sigma_kProbe (or the last one) at each ladder step.
  std::vector<double> sigmaProbe;
  std::vector<int> smallCounts;
  bool svDecays = false;
  bool svStable = false;
  std::vector<double> radii;
  /// sup_{|z| = R} |A~(z)| at the largest N.
  std::vector<double> tails;
  std::vector<double> tailErrorBounds;
  bool tailDecays = false;
  /// "compact-consistent" or "not compact-consistent" (heuristic).
  std::string verdict;
  bool compact() const { return verdict == "compact-consistent"; }
};

/// Singular-value decay along the ladder plus the Berezin tail at the
/// largest N; both must decay for "compact-consistent".
CompactnessProfile compactness_probe(const OperatorFactory& a, double t, int n, const std::vector<int>& ladder,
                                     const std::vector<double>& radii, const CompactnessOptions& opts = {});

struct CommutatorProfile {
  bool fIsVO = false;
  bool gIsBUC = false;
  /// Largest entry of [T_f, T_g] at the largest N.
  double maxEntry = 0.0;
  CompactnessProfile probe;
};

/// compactness_probe on [T_f, T_g].
CommutatorProfile commutator_probe(const Symbol& f, const Symbol& g, double t, const std::vector<int>& ladder,
                                   const std::vector<double>& radii, const CompactnessOptions& opts = {});

// ---------------------------------------------------------------------------
// Slowly oscillating symbols

struct SlowOscillationVerdict {
  TagCheck slowCheck;
  TagCheck symbolTail;
  TagCheck heatTail;
  CompactnessProfile compactness;
  /// All three proxies agree.
  bool agree = false;
  /// "all-pass", "all-fail" or "disagree".
  std::string verdict;
};

/// Compares c0 tails of f and f^(t) over radii with the compactness probe of T_f.
SlowOscillationVerdict slow_oscillation_equivalence(const Symbol& f, double t, const std::vector<double>& radii,
                                                    const std::vector<int>& ladder = {48, 96},
                                                    const std::vector<double>& probeRadii = {4.0, 6.0, 8.0});

// ---------------------------------------------------------------------------
// Boundary extension

/// f0(z) = smooth_step(|z| - cutoffRadius) phi(arg z) (n = 1) with phi given by
/// its Fourier series. Throws when a 2M-point series does not reproduce phi
/// to 1e-10 on a finer grid (discontinuous or unresolved data).
Symbol extend_boundary_symbol(const std::function<Complex(double)>& boundaryData, double cutoffRadius,
                              int fourierSamples = 256);

}  // namespace focklab
