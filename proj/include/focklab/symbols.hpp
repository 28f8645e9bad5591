#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "focklab/core_types.hpp"

namespace focklab {

enum class SymbolTag : std::uint8_t {
  Bounded = 1,
  C0 = 2,
  BUC = 4,
  VanishingOscillation = 8,
  SlowlyOscillating = 16,
};

class TagSet {
 public:
  TagSet() = default;
  TagSet(std::initializer_list<SymbolTag> tags) {
    for (SymbolTag t : tags) bits_ |= static_cast<std::uint8_t>(t);
  }
  bool has(SymbolTag t) const { return (bits_ & static_cast<std::uint8_t>(t)) != 0; }
  TagSet with(SymbolTag t) const {
    TagSet r = *this;
    r.bits_ |= static_cast<std::uint8_t>(t);
    return r;
  }
  TagSet without(SymbolTag t) const {
    TagSet r = *this;
    r.bits_ &= static_cast<std::uint8_t>(~static_cast<std::uint8_t>(t));
    return r;
  }
  friend TagSet operator&(TagSet a, TagSet b) {
    TagSet r;
    r.bits_ = a.bits_ & b.bits_;
    return r;
  }
  friend bool operator==(TagSet a, TagSet b) { return a.bits_ == b.bits_; }
  std::vector<std::string> names() const;
  static TagSet from_names(const std::vector<std::string>& names);

 private:
  std::uint8_t bits_ = 0;
};

std::string to_string(SymbolTag t);
SymbolTag symbol_tag_from_string(const std::string& s);

enum class SymbolKind {
  Constant,
  Gaussian,
  PolyGaussian,
  Angular,
  Radial,
  PlaneWave,
  SmoothSign,
  Sum,
  Product,
  Affine,
  Heat,
  Callable,
};

enum class RadialProfile {
  /// sin(sqrt(1 + r))
  SinSqrt,
  /// 1 / (1 + log(1 + r))
  InvLog,
  /// lo + (hi - lo) smooth_step(r - r1 + 1/2)
  Step,
  /// Monotone cubic (PCHIP) through samples; evaluation outside the knots throws.
  Sampled,
};

class Symbol;

struct SymbolNode {
  SymbolKind kind = SymbolKind::Constant;
  Complex value{0.0};
  /// exp(-gamma |z|^2), Re gamma >= 0.
  Complex gamma{0.0};
  /// sum_j coeffs[j] |z|^{2j} exp(-gamma |z|^2)
  std::vector<Complex> coeffs;
  /// smooth_step(|z| - r0) sum_m phi_m e^{i m arg z}  (n = 1)
  std::vector<std::pair<int, Complex>> harmonics;
  double r0 = 0.0;
  RadialProfile profile = RadialProfile::SinSqrt;
  double r1 = 0.0;
  Complex lo{0.0}, hi{0.0};
  std::vector<double> knots, samples, slopes;
  /// e^{i Re(z . conj(u))} or tanh(Re(z . conj(u)) / width)
  Point direction;
  double width = 1.0;
  std::vector<Symbol> children;
  /// child(flip * scale * (z - center))
  Point center;
  double scale = 1.0;
  int flip = 1;
  /// heat transform time of the child
  double s = 0.0;
  std::function<Complex(const Point&)> fn;
  double fnBound = 0.0;
  std::string label;
};

/// Immutable symbol f: C^n -> C described as an expression tree over
/// closed-form families. The group actions (translation, reflection,
/// dilation) act on the tree, so identities between them hold exactly.
class Symbol {
 public:
  Symbol();  // constant 0

  static Symbol constant(Complex c);
  /// exp(-|z|^2 / a)
  static Symbol gaussian(double a);
  /// exp(-gamma |z|^2) for complex gamma with Re gamma >= 0
  static Symbol complex_gaussian(Complex gamma);
  /// exp(i a |z|^2)
  static Symbol oscillatory(double a);
  /// sum_j c_j |z|^{2j} exp(-|z|^2 / a)
  static Symbol poly_gaussian(std::vector<Complex> coeffs, double a);
  /// sum_j c_j |z|^{2j} exp(-gamma |z|^2), Re gamma > 0
  static Symbol complex_poly_gaussian(std::vector<Complex> coeffs, Complex gamma);
  /// smooth_step(|z| - r0) sum_m phi_m e^{i m theta}
  static Symbol angular(std::vector<std::pair<int, Complex>> harmonics, double r0);
  static Symbol sin_sqrt();
  static Symbol inv_log();
  static Symbol radial_step(Complex inside, Complex outside, double r1);
  static Symbol radial_sampled(std::vector<double> knots, std::vector<double> values);
  /// exp(i Re(z . conj(u)))
  static Symbol plane_wave(const Point& u);
  /// tanh(Re(z . conj(u)) / width)
  static Symbol smooth_sign(const Point& u, double width);
  static Symbol sum(std::vector<Symbol> terms);
  static Symbol product(std::vector<Symbol> factors);
  /// Symbol defined by a callable with a certified sup bound.
  static Symbol callable(std::function<Complex(const Point&)> fn, double bound, TagSet tags, std::string label);
  /// Heat transform f^(s) kept symbolic; evaluation computes it.
  static Symbol heat_of(const Symbol& f, double s);

  Complex operator()(const Point& z) const;
  Complex eval(const Point& z) const { return (*this)(z); }

  /// Certified sup |f| (infinity when unbounded).
  double bound() const;
  TagSet tags() const { return tags_; }
  Symbol with_tags(TagSet tags) const;
  bool has(SymbolTag t) const { return tags_.has(t); }

  /// f(w - z)
  Symbol translate(const Point& z) const;
  /// f(-w)
  Symbol reflect() const;
  /// f(lambda w)
  Symbol dilate(double lambda) const;
  Symbol scaled(Complex c) const;

  friend Symbol operator+(const Symbol& a, const Symbol& b) { return sum({a, b}); }
  friend Symbol operator-(const Symbol& a, const Symbol& b) { return sum({a, b.scaled(-1.0)}); }
  friend Symbol operator*(const Symbol& a, const Symbol& b) { return product({a, b}); }

  const SymbolNode& node() const { return *node_; }
  SymbolKind kind() const { return node_->kind; }
  const std::vector<Symbol>& children() const { return node_->children; }

  /// Radii where a centered symbol is less smooth (used as quadrature breakpoints).
  std::vector<double> breakpoints() const;

  bool is_constant() const;
  /// True when f depends on |z| only (and the node tree proves it).
  bool is_radial() const;

  std::string describe() const;

 private:
  explicit Symbol(std::shared_ptr<const SymbolNode> node, TagSet tags);
  static Symbol make(SymbolNode node, TagSet tags);

  std::shared_ptr<const SymbolNode> node_;
  TagSet tags_;
};

nlohmann::json symbol_to_json(const Symbol& f);
/// Throws Error on unknown keys or families.
Symbol symbol_from_json(const nlohmann::json& j);

nlohmann::json complex_to_json(Complex c);
Complex complex_from_json(const nlohmann::json& j);
nlohmann::json point_to_json(const Point& z);
Point point_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Structural forms used by the assembly routines.

/// One Gaussian-type term amp * P(|z - c|^2) * exp(-gamma |z - c|^2) with
/// real gamma > 0, P given by coefficients in ascending powers.
struct GaussianTerm {
  Complex amplitude{1.0};
  double gamma = 1.0;
  Point center;
  std::vector<Complex> poly{Complex(1.0)};
};

/// Decomposes f into a finite sum of Gaussian-type terms, or nullopt.
std::optional<std::vector<GaussianTerm>> gaussian_decomposition(const Symbol& f, int n);

/// rho(r) = sum_j poly[j] r^{2j} exp(-gamma r^2), complex gamma with Re gamma >= 0.
struct RadialGaussianTerm {
  Complex gamma{0.0};
  std::vector<Complex> poly;
};

/// Angular Fourier mode of a centered symbol: f(r e^{i theta}) = sum over
/// modes of e^{i m theta} rho_m(r). When closedForm is set rho is the sum of
/// the listed Gaussian-type terms.
struct Harmonic {
  int m = 0;
  std::function<Complex(double)> rho;
  bool closedForm = false;
  std::vector<RadialGaussianTerm> terms;
  std::vector<double> breakpoints;
};

/// Harmonic modes of a centered symbol for n = 1; for n > 1 only purely
/// radial symbols (a single m = 0 mode) are decomposed.
std::optional<std::vector<Harmonic>> harmonic_decomposition(const Symbol& f, int n);

// ---------------------------------------------------------------------------
// Heat transform

enum class HeatMethod { ClosedForm, Quadrature };

struct HeatValue {
  Complex value{0.0};
  double errorBound = 0.0;
  HeatMethod method = HeatMethod::ClosedForm;
};

struct HeatOptions {
  double tolerance = 1e-12;
  int maxRefinements = 6;
};

/// (g_s * f)(z), g_s(w) = (pi s)^{-n} exp(-|w|^2 / s). Closed form for the
/// Gaussian, oscillatory, polynomial-Gaussian, plane-wave and constant
/// families (and their affine images, sums and heat transforms); 1-D radial
/// quadrature for centered radial/angular symbols; polar quadrature otherwise.
/// Throws when the tail cannot be certified.
HeatValue heat_transform(const Symbol& f, double s, const Point& z, const HeatOptions& opts = {});

struct HeatTransformResult {
  double s = 0.0;
  std::vector<Point> points;
  std::vector<Complex> values;
  HeatMethod method = HeatMethod::ClosedForm;
  double errorBound = 0.0;
};

HeatTransformResult heat_transform(const Symbol& f, double s, const std::vector<Point>& zs,
                                   const HeatOptions& opts = {});

/// f^(s) as a symbol, simplified to a closed-form family when possible.
Symbol heat_symbol(const Symbol& f, double s, int n);

/// sup |f^(s)|: closed form where known, otherwise sampled with the certified
/// bound sup|f| as cap.
double heat_sup(const Symbol& f, double s, int n);

// ---------------------------------------------------------------------------
// Regularity probes

struct ModulusEstimate {
  double value = 0.0;
  /// Value on the refined grid; the difference measures grid convergence.
  double refined = 0.0;
};

/// max over |z| = R, |w| <= radius of |f(z) - f(z - w)| (default radius 1).
ModulusEstimate vo_modulus(const Symbol& f, double R, int n = 1, double radius = 1.0);

/// max over |z| = R of |f(z)|.
ModulusEstimate c0_tail(const Symbol& f, double R, int n = 1);

struct TagCheck {
  SymbolTag tag = SymbolTag::Bounded;
  std::vector<double> radii;
  std::vector<double> values;
  bool passed = false;
  std::string detail;
};

/// Numeric check behind an asserted tag over an increasing radius grid:
/// C0 and VO need strictly decreasing probes with last <= decay * first;
/// BUC needs the small-shift modulus to shrink with the shift; slowly
/// oscillating needs the 0.1-shift modulus below 0.1 and non-increasing;
/// bounded compares sampled values with the certified bound.
TagCheck check_tag(const Symbol& f, SymbolTag tag, const std::vector<double>& radii, int n = 1,
                   double decay = 0.5);

}  // namespace focklab
