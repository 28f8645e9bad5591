#include "focklab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "focklab/special.hpp"

namespace focklab {

namespace {

constexpr std::pair<SymbolTag, const char*> kTagNames[] = {
    {SymbolTag::Bounded, "bounded"},
    {SymbolTag::C0, "C0"},
    {SymbolTag::BUC, "BUC"},
    {SymbolTag::VanishingOscillation, "VO"},
    {SymbolTag::SlowlyOscillating, "slowly-oscillating"},
};

const TagSet kAllTags{SymbolTag::Bounded, SymbolTag::C0, SymbolTag::BUC, SymbolTag::VanishingOscillation,
                      SymbolTag::SlowlyOscillating};
const TagSet kVoTags{SymbolTag::Bounded, SymbolTag::BUC, SymbolTag::VanishingOscillation,
                     SymbolTag::SlowlyOscillating};

bool is_zero_point(const Point& p) {
  for (int i = 0; i < p.dim(); ++i)
    if (p[i] != Complex(0.0)) return false;
  return true;
}

// Fritsch-Carlson monotone slopes.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  std::vector<double> d(m, 0.0), delta(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  if (m == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < m; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto endpoint = [](double h0, double h1, double del0, double del1) {
    double dd = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (dd * del0 <= 0.0) return 0.0;
    if (del0 * del1 <= 0.0 && std::abs(dd) > std::abs(3.0 * del0)) return 3.0 * del0;
    return dd;
  };
  d[0] = endpoint(x[1] - x[0], x[2] - x[1], delta[0], delta[1]);
  d[m - 1] = endpoint(x[m - 1] - x[m - 2], x[m - 2] - x[m - 3], delta[m - 2], delta[m - 3]);
  return d;
}

double pchip_eval(const SymbolNode& nd, double r) {
  const auto& x = nd.knots;
  if (r < x.front() || r > x.back()) {
    throw Error("radial_sampled: evaluation at r = " + std::to_string(r) + " outside sample range [" +
                std::to_string(x.front()) + ", " + std::to_string(x.back()) + "]");
  }
  std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r) - x.begin());
  i = std::clamp<std::size_t>(i, 1, x.size() - 1) - 1;
  const double h = x[i + 1] - x[i];
  const double u = (r - x[i]) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  return h00 * nd.samples[i] + h10 * h * nd.slopes[i] + h01 * nd.samples[i + 1] + h11 * h * nd.slopes[i + 1];
}

Complex radial_profile_eval(const SymbolNode& nd, double r) {
  switch (nd.profile) {
    case RadialProfile::SinSqrt: return std::sin(std::sqrt(1.0 + r));
    case RadialProfile::InvLog: return 1.0 / (1.0 + std::log1p(r));
    case RadialProfile::Step: return nd.lo + (nd.hi - nd.lo) * special::smooth_step(r - nd.r1 + 0.5);
    case RadialProfile::Sampled: return pchip_eval(nd, r);
  }
  return 0.0;
}

}  // namespace

std::string to_string(SymbolTag t) {
  for (const auto& [tag, name] : kTagNames)
    if (tag == t) return name;
  return "?";
}

SymbolTag symbol_tag_from_string(const std::string& s) {
  for (const auto& [tag, name] : kTagNames)
    if (s == name) return tag;
  throw Error("unknown symbol tag '" + s + "'");
}

std::vector<std::string> TagSet::names() const {
  std::vector<std::string> out;
  for (const auto& [tag, name] : kTagNames)
    if (has(tag)) out.emplace_back(name);
  return out;
}

TagSet TagSet::from_names(const std::vector<std::string>& names) {
  TagSet t;
  for (const auto& n : names) t = t.with(symbol_tag_from_string(n));
  return t;
}

// ---------------------------------------------------------------------------

Symbol::Symbol() : Symbol(std::make_shared<const SymbolNode>(), kAllTags) {}

Symbol::Symbol(std::shared_ptr<const SymbolNode> node, TagSet tags) : node_(std::move(node)), tags_(tags) {}

Symbol Symbol::make(SymbolNode node, TagSet tags) {
  return Symbol(std::make_shared<const SymbolNode>(std::move(node)), tags);
}

Symbol Symbol::constant(Complex c) {
  SymbolNode nd;
  nd.kind = SymbolKind::Constant;
  nd.value = c;
  return make(std::move(nd), c == Complex(0.0) ? kAllTags : kVoTags);
}

Symbol Symbol::complex_gaussian(Complex gamma) {
  if (gamma.real() < 0.0) throw Error("complex_gaussian: Re gamma must be nonnegative");
  if (gamma == Complex(0.0)) return constant(1.0);
  SymbolNode nd;
  nd.kind = SymbolKind::Gaussian;
  nd.gamma = gamma;
  return make(std::move(nd), gamma.real() > 0.0 ? kAllTags : TagSet{SymbolTag::Bounded});
}

Symbol Symbol::gaussian(double a) {
  if (!(a > 0.0)) throw Error("gaussian: width must be positive");
  return complex_gaussian(1.0 / a);
}

Symbol Symbol::oscillatory(double a) { return complex_gaussian(Complex(0.0, -a)); }

Symbol Symbol::poly_gaussian(std::vector<Complex> coeffs, double a) {
  if (!(a > 0.0)) throw Error("poly_gaussian: width must be positive");
  return complex_poly_gaussian(std::move(coeffs), 1.0 / a);
}

Symbol Symbol::complex_poly_gaussian(std::vector<Complex> coeffs, Complex gamma) {
  if (!(gamma.real() > 0.0)) throw Error("poly_gaussian: Re gamma must be positive");
  if (coeffs.empty()) throw Error("poly_gaussian: empty coefficient list");
  SymbolNode nd;
  nd.kind = SymbolKind::PolyGaussian;
  nd.gamma = gamma;
  nd.coeffs = std::move(coeffs);
  return make(std::move(nd), kAllTags);
}

Symbol Symbol::angular(std::vector<std::pair<int, Complex>> harmonics, double r0) {
  if (harmonics.empty()) throw Error("angular: no harmonics");
  if (r0 < 0.0) throw Error("angular: cutoff radius must be nonnegative");
  SymbolNode nd;
  nd.kind = SymbolKind::Angular;
  nd.harmonics = std::move(harmonics);
  nd.r0 = r0;
  return make(std::move(nd), kVoTags);
}

Symbol Symbol::sin_sqrt() {
  SymbolNode nd;
  nd.kind = SymbolKind::Radial;
  nd.profile = RadialProfile::SinSqrt;
  return make(std::move(nd), kVoTags);
}

Symbol Symbol::inv_log() {
  SymbolNode nd;
  nd.kind = SymbolKind::Radial;
  nd.profile = RadialProfile::InvLog;
  return make(std::move(nd), kAllTags);
}

Symbol Symbol::radial_step(Complex inside, Complex outside, double r1) {
  SymbolNode nd;
  nd.kind = SymbolKind::Radial;
  nd.profile = RadialProfile::Step;
  nd.lo = inside;
  nd.hi = outside;
  nd.r1 = r1;
  return make(std::move(nd), outside == Complex(0.0) ? kAllTags : kVoTags);
}

Symbol Symbol::radial_sampled(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() < 3 || knots.size() != values.size()) {
    throw Error("radial_sampled: need at least 3 knots with matching values");
  }
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    if (!(knots[i + 1] > knots[i])) throw Error("radial_sampled: knots must be strictly increasing");
  if (knots.front() < 0.0) throw Error("radial_sampled: knots must be nonnegative");
  SymbolNode nd;
  nd.kind = SymbolKind::Radial;
  nd.profile = RadialProfile::Sampled;
  nd.slopes = pchip_slopes(knots, values);
  nd.knots = std::move(knots);
  nd.samples = std::move(values);
  return make(std::move(nd), TagSet{SymbolTag::Bounded});
}

Symbol Symbol::plane_wave(const Point& u) {
  SymbolNode nd;
  nd.kind = SymbolKind::PlaneWave;
  nd.direction = u;
  return make(std::move(nd), TagSet{SymbolTag::Bounded, SymbolTag::BUC});
}

Symbol Symbol::smooth_sign(const Point& u, double width) {
  if (!(width > 0.0)) throw Error("smooth_sign: width must be positive");
  SymbolNode nd;
  nd.kind = SymbolKind::SmoothSign;
  nd.direction = u;
  nd.width = width;
  return make(std::move(nd), TagSet{SymbolTag::Bounded, SymbolTag::BUC});
}

Symbol Symbol::sum(std::vector<Symbol> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms.front();
  TagSet tags = kAllTags;
  for (const Symbol& s : terms) tags = tags & s.tags();
  SymbolNode nd;
  nd.kind = SymbolKind::Sum;
  nd.children = std::move(terms);
  return make(std::move(nd), tags);
}

Symbol Symbol::product(std::vector<Symbol> factors) {
  if (factors.empty()) return constant(1.0);
  if (factors.size() == 1) return factors.front();
  TagSet tags = kAllTags;
  bool anyC0 = false, allBounded = true;
  for (const Symbol& s : factors) {
    tags = tags & s.tags();
    anyC0 = anyC0 || s.has(SymbolTag::C0);
    allBounded = allBounded && s.has(SymbolTag::Bounded);
  }
  if (anyC0 && allBounded) tags = tags.with(SymbolTag::C0);
  SymbolNode nd;
  nd.kind = SymbolKind::Product;
  nd.children = std::move(factors);
  return make(std::move(nd), tags);
}

Symbol Symbol::callable(std::function<Complex(const Point&)> fn, double bound, TagSet tags, std::string label) {
  if (!fn) throw Error("callable: empty function");
  SymbolNode nd;
  nd.kind = SymbolKind::Callable;
  nd.fn = std::move(fn);
  nd.fnBound = bound;
  nd.label = std::move(label);
  return make(std::move(nd), tags);
}

Symbol Symbol::heat_of(const Symbol& f, double s) {
  if (!(s > 0.0)) throw Error("heat_of: s must be positive");
  if (f.kind() == SymbolKind::Heat) return heat_of(f.children().front(), f.node().s + s);
  SymbolNode nd;
  nd.kind = SymbolKind::Heat;
  nd.children = {f};
  nd.s = s;
  TagSet tags = f.tags();
  if (tags.has(SymbolTag::Bounded)) tags = tags.with(SymbolTag::BUC);
  return make(std::move(nd), tags);
}

Symbol Symbol::with_tags(TagSet tags) const { return Symbol(node_, tags); }

Complex Symbol::operator()(const Point& z) const {
  const SymbolNode& nd = *node_;
  switch (nd.kind) {
    case SymbolKind::Constant:
      return nd.value;
    case SymbolKind::Gaussian:
      return std::exp(-nd.gamma * z.norm2());
    case SymbolKind::PolyGaussian: {
      const double v = z.norm2();
      Complex p = 0.0;
      for (auto it = nd.coeffs.rbegin(); it != nd.coeffs.rend(); ++it) p = p * v + *it;
      return p * std::exp(-nd.gamma * v);
    }
    case SymbolKind::Angular: {
      if (z.dim() != 1) throw Error("angular symbols are defined for n = 1 only");
      const double r = std::abs(z[0]);
      const double chi = special::smooth_step(r - nd.r0);
      if (chi == 0.0) return 0.0;
      const double th = std::arg(z[0]);
      Complex s = 0.0;
      for (const auto& [m, phi] : nd.harmonics) s += phi * std::polar(1.0, m * th);
      return chi * s;
    }
    case SymbolKind::Radial:
      return radial_profile_eval(nd, z.norm());
    case SymbolKind::PlaneWave:
      return std::exp(kI * std::real(dot(z, nd.direction)));
    case SymbolKind::SmoothSign:
      return std::tanh(std::real(dot(z, nd.direction)) / nd.width);
    case SymbolKind::Sum: {
      Complex s = 0.0;
      for (const Symbol& c : nd.children) s += c(z);
      return s;
    }
    case SymbolKind::Product: {
      Complex p = 1.0;
      for (const Symbol& c : nd.children) {
        p *= c(z);
        if (p == Complex(0.0)) return 0.0;
      }
      return p;
    }
    case SymbolKind::Affine: {
      Point w = z;
      if (nd.center.dim() != 0) w -= nd.center;
      return nd.children.front()((nd.flip * nd.scale) * w);
    }
    case SymbolKind::Heat:
      return heat_transform(nd.children.front(), nd.s, z).value;
    case SymbolKind::Callable:
      return nd.fn(z);
  }
  return 0.0;
}

double Symbol::bound() const {
  const SymbolNode& nd = *node_;
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (nd.kind) {
    case SymbolKind::Constant: return std::abs(nd.value);
    case SymbolKind::Gaussian: return 1.0;
    case SymbolKind::PolyGaussian: {
      // max_v v^j e^{-Re(gamma) v} = (j / (e Re gamma))^j
      const double g = nd.gamma.real();
      double b = 0.0;
      for (std::size_t j = 0; j < nd.coeffs.size(); ++j) {
        const double m = j == 0 ? 1.0 : std::pow(static_cast<double>(j) / (std::exp(1.0) * g), static_cast<double>(j));
        b += std::abs(nd.coeffs[j]) * m;
      }
      return b;
    }
    case SymbolKind::Angular: {
      double b = 0.0;
      for (const auto& h : nd.harmonics) b += std::abs(h.second);
      return b;
    }
    case SymbolKind::Radial:
      switch (nd.profile) {
        case RadialProfile::SinSqrt:
        case RadialProfile::InvLog: return 1.0;
        case RadialProfile::Step: return std::max(std::abs(nd.lo), std::abs(nd.hi));
        case RadialProfile::Sampled: {
          double b = 0.0;
          for (double v : nd.samples) b = std::max(b, std::abs(v));
          return b;
        }
      }
      return inf;
    case SymbolKind::PlaneWave:
    case SymbolKind::SmoothSign: return 1.0;
    case SymbolKind::Sum: {
      double b = 0.0;
      for (const Symbol& c : nd.children) b += c.bound();
      return b;
    }
    case SymbolKind::Product: {
      double b = 1.0;
      for (const Symbol& c : nd.children) b *= c.bound();
      return b;
    }
    case SymbolKind::Affine:
    case SymbolKind::Heat: return nd.children.front().bound();
    case SymbolKind::Callable: return nd.fnBound;
  }
  return inf;
}

Symbol Symbol::translate(const Point& z) const {
  if (kind() == SymbolKind::Constant || is_zero_point(z)) return *this;
  SymbolNode nd;
  nd.kind = SymbolKind::Affine;
  if (kind() == SymbolKind::Affine) {
    nd = *node_;
    nd.center = nd.center.dim() == 0 ? z : nd.center + z;
  } else {
    nd.children = {*this};
    nd.center = z;
  }
  return make(std::move(nd), tags_);
}

Symbol Symbol::reflect() const {
  if (kind() == SymbolKind::Constant) return *this;
  SymbolNode nd;
  nd.kind = SymbolKind::Affine;
  if (kind() == SymbolKind::Affine) {
    nd = *node_;
    if (nd.center.dim() != 0) nd.center = -nd.center;
  } else {
    nd.children = {*this};
  }
  nd.flip = -nd.flip;
  if (nd.flip == 1 && nd.scale == 1.0 && (nd.center.dim() == 0 || is_zero_point(nd.center))) {
    return nd.children.front().with_tags(tags_);
  }
  return make(std::move(nd), tags_);
}

Symbol Symbol::dilate(double lambda) const {
  if (!(lambda > 0.0)) throw Error("dilate: lambda must be positive");
  if (kind() == SymbolKind::Constant || lambda == 1.0) return *this;
  SymbolNode nd;
  nd.kind = SymbolKind::Affine;
  if (kind() == SymbolKind::Affine) {
    nd = *node_;
    if (nd.center.dim() != 0) nd.center = (1.0 / lambda) * nd.center;
  } else {
    nd.children = {*this};
  }
  nd.scale *= lambda;
  return make(std::move(nd), tags_);
}

Symbol Symbol::scaled(Complex c) const {
  if (c == Complex(1.0)) return *this;
  if (kind() == SymbolKind::Constant) return constant(c * node_->value).with_tags(tags_);
  if (kind() == SymbolKind::Product && children().front().kind() == SymbolKind::Constant) {
    std::vector<Symbol> f = children();
    f.front() = constant(c * f.front().node().value);
    return product(std::move(f)).with_tags(tags_);
  }
  return product({constant(c), *this}).with_tags(tags_);
}

std::vector<double> Symbol::breakpoints() const {
  const SymbolNode& nd = *node_;
  std::vector<double> out;
  switch (nd.kind) {
    case SymbolKind::Angular:
      out = {nd.r0, nd.r0 + 1.0};
      break;
    case SymbolKind::Radial:
      if (nd.profile == RadialProfile::Step) out = {nd.r1 - 0.5, nd.r1 + 0.5};
      if (nd.profile == RadialProfile::Sampled) out = nd.knots;
      break;
    case SymbolKind::Sum:
    case SymbolKind::Product:
      for (const Symbol& c : nd.children) {
        auto b = c.breakpoints();
        out.insert(out.end(), b.begin(), b.end());
      }
      break;
    case SymbolKind::Affine:
      if (nd.center.dim() == 0 || is_zero_point(nd.center)) {
        for (double b : nd.children.front().breakpoints()) out.push_back(b / nd.scale);
      }
      break;
    default:
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Symbol::is_constant() const { return kind() == SymbolKind::Constant; }

bool Symbol::is_radial() const {
  const SymbolNode& nd = *node_;
  switch (nd.kind) {
    case SymbolKind::Constant:
    case SymbolKind::Gaussian:
    case SymbolKind::PolyGaussian:
    case SymbolKind::Radial: return true;
    case SymbolKind::Sum:
    case SymbolKind::Product:
      return std::all_of(nd.children.begin(), nd.children.end(), [](const Symbol& c) { return c.is_radial(); });
    case SymbolKind::Affine:
      return (nd.center.dim() == 0 || is_zero_point(nd.center)) && nd.children.front().is_radial();
    case SymbolKind::Heat: return nd.children.front().is_radial();
    default: return false;
  }
}

std::string Symbol::describe() const {
  std::ostringstream os;
  os.precision(6);
  const SymbolNode& nd = *node_;
  switch (nd.kind) {
    case SymbolKind::Constant: os << "const(" << nd.value << ")"; break;
    case SymbolKind::Gaussian: os << "exp(-" << nd.gamma << "|z|^2)"; break;
    case SymbolKind::PolyGaussian: os << "poly(|z|^2; " << nd.coeffs.size() << " terms)exp(-" << nd.gamma << "|z|^2)"; break;
    case SymbolKind::Angular:
      os << "angular(r0=" << nd.r0;
      for (const auto& [m, phi] : nd.harmonics) os << ", " << phi << "e^{" << m << "i theta}";
      os << ")";
      break;
    case SymbolKind::Radial:
      switch (nd.profile) {
        case RadialProfile::SinSqrt: os << "sin(sqrt(1+|z|))"; break;
        case RadialProfile::InvLog: os << "1/(1+log(1+|z|))"; break;
        case RadialProfile::Step: os << "step(" << nd.lo << "->" << nd.hi << " at " << nd.r1 << ")"; break;
        case RadialProfile::Sampled: os << "sampled(" << nd.knots.size() << " knots)"; break;
      }
      break;
    case SymbolKind::PlaneWave: os << "plane_wave"; break;
    case SymbolKind::SmoothSign: os << "tanh(Re(z.u)/" << nd.width << ")"; break;
    case SymbolKind::Sum:
    case SymbolKind::Product: {
      os << (nd.kind == SymbolKind::Sum ? "sum(" : "product(");
      for (std::size_t i = 0; i < nd.children.size(); ++i) os << (i ? ", " : "") << nd.children[i].describe();
      os << ")";
      break;
    }
    case SymbolKind::Affine: os << "affine(" << nd.children.front().describe() << ")"; break;
    case SymbolKind::Heat: os << "heat(" << nd.children.front().describe() << ", s=" << nd.s << ")"; break;
    case SymbolKind::Callable: os << nd.label; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json complex_to_json(Complex c) {
  if (c.imag() == 0.0) return c.real();
  return nlohmann::json::array({c.real(), c.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw Error("expected a complex number (number or [re, im]), got " + j.dump());
}

nlohmann::json point_to_json(const Point& z) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < z.dim(); ++i) a.push_back(complex_to_json(z[i]));
  return a;
}

Point point_from_json(const nlohmann::json& j) {
  if (j.is_number()) return Point{Complex(j.get<double>(), 0.0)};
  if (!j.is_array() || j.empty()) throw Error("expected a point (list of complex coordinates), got " + j.dump());
  // A bare [re, im] pair is a point of C^1.
  if (j.size() == 2 && j[0].is_number() && j[1].is_number()) return Point{complex_from_json(j)};
  Point p(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<int>(i)] = complex_from_json(j[i]);
  return p;
}

namespace {

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  static const char* common[] = {"family", "translate", "reflect", "dilate", "amplitude", "tags"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* c : common) ok = ok || key == c;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error("symbol '" + j.value("family", std::string("?")) + "': unknown key '" + key + "'");
  }
}

double number_at(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("symbol: missing key '") + key + "'");
  if (!j.at(key).is_number()) throw Error(std::string("symbol: key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::json symbol_to_json(const Symbol& f) {
  const SymbolNode& nd = f.node();
  nlohmann::json j;
  switch (nd.kind) {
    case SymbolKind::Constant:
      j = {{"family", "constant"}, {"value", complex_to_json(nd.value)}};
      break;
    case SymbolKind::Gaussian:
      j = {{"family", "complex_gaussian"}, {"gamma", complex_to_json(nd.gamma)}};
      break;
    case SymbolKind::PolyGaussian: {
      nlohmann::json c = nlohmann::json::array();
      for (Complex v : nd.coeffs) c.push_back(complex_to_json(v));
      j = {{"family", "poly_gaussian"}, {"gamma", complex_to_json(nd.gamma)}, {"coeffs", c}};
      break;
    }
    case SymbolKind::Angular: {
      nlohmann::json h = nlohmann::json::array();
      for (const auto& [m, phi] : nd.harmonics) h.push_back({{"m", m}, {"coeff", complex_to_json(phi)}});
      j = {{"family", "angular"}, {"harmonics", h}, {"r0", nd.r0}};
      break;
    }
    case SymbolKind::Radial:
      switch (nd.profile) {
        case RadialProfile::SinSqrt: j = {{"family", "sin_sqrt"}}; break;
        case RadialProfile::InvLog: j = {{"family", "inv_log"}}; break;
        case RadialProfile::Step:
          j = {{"family", "radial_step"},
               {"inside", complex_to_json(nd.lo)},
               {"outside", complex_to_json(nd.hi)},
               {"r1", nd.r1}};
          break;
        case RadialProfile::Sampled:
          j = {{"family", "radial_sampled"}, {"knots", nd.knots}, {"values", nd.samples}};
          break;
      }
      break;
    case SymbolKind::PlaneWave:
      j = {{"family", "plane_wave"}, {"direction", point_to_json(nd.direction)}};
      break;
    case SymbolKind::SmoothSign:
      j = {{"family", "smooth_sign"}, {"direction", point_to_json(nd.direction)}, {"width", nd.width}};
      break;
    case SymbolKind::Sum:
    case SymbolKind::Product: {
      nlohmann::json c = nlohmann::json::array();
      for (const Symbol& s : nd.children) c.push_back(symbol_to_json(s));
      j = {{"family", nd.kind == SymbolKind::Sum ? "sum" : "product"},
           {nd.kind == SymbolKind::Sum ? "terms" : "factors", c}};
      break;
    }
    case SymbolKind::Affine:
      j = {{"family", "affine"}, {"of", symbol_to_json(nd.children.front())}, {"scale", nd.scale}, {"flip", nd.flip}};
      if (nd.center.dim() != 0) j["center"] = point_to_json(nd.center);
      break;
    case SymbolKind::Heat:
      j = {{"family", "heat"}, {"of", symbol_to_json(nd.children.front())}, {"s", nd.s}};
      break;
    case SymbolKind::Callable:
      throw Error("symbol '" + nd.label + "' is defined by a callable and cannot be serialized");
  }
  j["tags"] = f.tags().names();
  return j;
}

Symbol symbol_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("symbol: expected a table, got " + j.dump());
  if (!j.contains("family") || !j.at("family").is_string()) throw Error("symbol: missing 'family'");
  const std::string fam = j.at("family").get<std::string>();
  Symbol f;
  if (fam == "constant") {
    require_keys(j, {"value"});
    f = Symbol::constant(complex_from_json(j.at("value")));
  } else if (fam == "gaussian") {
    require_keys(j, {"a", "center"});
    f = Symbol::gaussian(number_at(j, "a"));
    if (j.contains("center")) f = f.translate(point_from_json(j.at("center")));
  } else if (fam == "complex_gaussian") {
    require_keys(j, {"gamma"});
    f = Symbol::complex_gaussian(complex_from_json(j.at("gamma")));
  } else if (fam == "oscillatory") {
    require_keys(j, {"a"});
    f = Symbol::oscillatory(number_at(j, "a"));
  } else if (fam == "poly_gaussian") {
    require_keys(j, {"a", "gamma", "coeffs"});
    std::vector<Complex> c;
    for (const auto& v : j.at("coeffs")) c.push_back(complex_from_json(v));
    f = j.contains("gamma") ? Symbol::complex_poly_gaussian(std::move(c), complex_from_json(j.at("gamma")))
                            : Symbol::poly_gaussian(std::move(c), number_at(j, "a"));
  } else if (fam == "angular") {
    require_keys(j, {"harmonics", "r0"});
    std::vector<std::pair<int, Complex>> h;
    for (const auto& e : j.at("harmonics")) {
      for (const auto& [key, value] : e.items()) {
        if (key != "m" && key != "coeff") throw Error("angular harmonic: unknown key '" + key + "'");
      }
      h.emplace_back(e.at("m").get<int>(), e.contains("coeff") ? complex_from_json(e.at("coeff")) : Complex(1.0));
    }
    f = Symbol::angular(std::move(h), j.contains("r0") ? number_at(j, "r0") : 1.0);
  } else if (fam == "sin_sqrt") {
    require_keys(j, {});
    f = Symbol::sin_sqrt();
  } else if (fam == "inv_log") {
    require_keys(j, {});
    f = Symbol::inv_log();
  } else if (fam == "radial_step") {
    require_keys(j, {"inside", "outside", "r1"});
    f = Symbol::radial_step(complex_from_json(j.at("inside")), complex_from_json(j.at("outside")), number_at(j, "r1"));
  } else if (fam == "radial_sampled") {
    require_keys(j, {"knots", "values"});
    f = Symbol::radial_sampled(j.at("knots").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
  } else if (fam == "plane_wave") {
    require_keys(j, {"direction"});
    f = Symbol::plane_wave(point_from_json(j.at("direction")));
  } else if (fam == "smooth_sign") {
    require_keys(j, {"direction", "width"});
    f = Symbol::smooth_sign(point_from_json(j.at("direction")), j.contains("width") ? number_at(j, "width") : 1.0);
  } else if (fam == "sum" || fam == "product") {
    const char* key = fam == "sum" ? "terms" : "factors";
    require_keys(j, {key});
    std::vector<Symbol> parts;
    for (const auto& e : j.at(key)) parts.push_back(symbol_from_json(e));
    f = fam == "sum" ? Symbol::sum(std::move(parts)) : Symbol::product(std::move(parts));
  } else if (fam == "affine") {
    require_keys(j, {"of", "center", "scale", "flip"});
    f = symbol_from_json(j.at("of"));
    if (j.contains("scale")) f = f.dilate(number_at(j, "scale"));
    if (j.contains("flip") && j.at("flip").get<int>() == -1) f = f.reflect();
    if (j.contains("center")) f = f.translate(point_from_json(j.at("center")));
  } else if (fam == "heat") {
    require_keys(j, {"of", "s"});
    f = Symbol::heat_of(symbol_from_json(j.at("of")), number_at(j, "s"));
  } else {
    throw Error("symbol: unknown family '" + fam + "'");
  }
  const TagSet familyTags = f.tags();
  if (j.contains("dilate")) f = f.dilate(number_at(j, "dilate"));
  if (j.contains("reflect") && j.at("reflect").get<bool>()) f = f.reflect();
  if (j.contains("translate")) f = f.translate(point_from_json(j.at("translate")));
  if (j.contains("amplitude")) f = f.scaled(complex_from_json(j.at("amplitude")));
  f = f.with_tags(j.contains("tags") ? TagSet::from_names(j.at("tags").get<std::vector<std::string>>()) : familyTags);
  return f;
}

}  // namespace focklab
