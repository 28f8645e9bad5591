#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "focklab/approximation.hpp"
#include "focklab/fock_core.hpp"
#include "focklab/limits.hpp"
#include "focklab/operators.hpp"
#include "focklab/symbols.hpp"

namespace focklab::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Catalog

const std::vector<SuiteInfo>& suite_catalog() {
  static const std::vector<SuiteInfo> catalog{
      {"basis-norms",
       "F^1 and F^inf norms of e_k: closed forms against quadrature",
       {"||e_k||_1 = 2^{k/2} Gamma(k/2+1) / sqrt(k!)", "||e_k||_inf = k^{k/2} e^{-k/2} / sqrt(k!)",
        "||e_k||_1 ||e_k||_inf = (2k)^{k/2} Gamma(k/2+1) e^{-k/2} / k! -> 1/sqrt(2)"}},
      {"kernels-weyl",
       "reproducing kernels and Weyl operators",
       {"K_z(w) = exp(w.conj(z)/t)", "||k_z||_p = 1", "W_z W_w = exp(-i Im(z.conj(w))/t) W_{z+w}",
        "W_z g(w) = k_z(w) g(w - z) is an isometry"}},
      {"toeplitz-assembly",
       "Toeplitz matrices against closed forms and Berezin transforms",
       {"<T_f e_k, e_k> = (a/(a+t))^{k+1} for f = exp(-|z|^2/a)", "B(T_f) = f^(t)"}},
      {"heat",
       "heat transforms: closed forms, quadrature and the semigroup law",
       {"f^(s) = g_s * f", "f^(s+r) = (f^(s))^(r)"}},
      {"correspondence",
       "module convolution against Toeplitz quantization of the Berezin transform",
       {"g_t * A = T_{B(A)}"}},
      {"wiener",
       "approximation of g_{t/N} by translates of g_t and operator reconstruction",
       {"||g_{t/N} - sum_j c_j g_t(. - z_j)||_1 <= 1/N",
        "||A - sum_j c_j alpha_{z_j}(T_{B(A)})|| <= ||A - g_{t/N} * A|| + (1/N)||A||"}},
      {"trace-identity",
       "heat transform as a trace against the nuclear operator T_0^(s)",
       {"f^(s)(z) = (t/s)^n tr(T_0^(s) alpha_{-z}(T_f))", "T_0^(s) e_alpha = (1 - t/s)^{|alpha|} e_alpha"}},
      {"berger-coburn",
       "operator norms of T_f against sup norms of heat transforms",
       {"||T_f|| <= C sup|f^(s)|, 0 < s < t/2", "sup|f^(s)| <= C ||T_f||, t/2 < s < 2t"}},
      {"dilation",
       "dilation conjugation of Toeplitz operators and Berezin transforms",
       {"C_{1/lambda} T_f^t C_lambda = T^{t lambda^2}_{f(./lambda)}", "B(C_{1/lambda} A C_lambda) = B(A)(./lambda)"}},
      {"limits",
       "directional limit symbols, limit operators and boundary extensions",
       {"f_x(w) = lim f(w - z_gamma)", "alpha_{z_gamma}(T_f) -> T_{f_x}", "f_0(z) = chi(|z|) phi(z/|z|)"}},
      {"spectrum",
       "essential spectra of VO symbols and Fredholm witnesses",
       {"sigma_ess(T_f) = f(boundary)", "(T_f - lambda) T_{1/(f - lambda)} - Id compact"}},
      {"compactness",
       "singular-value and Berezin-tail probes of compactness",
       {"A compact <=> B(A) in C_0", "f in C_0 <=> f^(t) in C_0 <=> T_f compact (slowly oscillating f)",
        "|<K_s k_z, k_w>| = exp(-s|z - w|^2/2t)"}},
      {"esscen",
       "commutators of Toeplitz operators with VO symbols",
       {"[T_f, T_g] compact for f in VO, g in BUC"}},
  };
  return catalog;
}

// ---------------------------------------------------------------------------
// Configuration

json suite_defaults() {
  return json{
      {"basis-norms", {{"kmax", 60}, {"tolerance", 1e-8}, {"limit_tolerance", 1e-3}}},
      {"kernels-weyl",
       {{"N", 32}, {"grid", 5}, {"radius", 2.0}, {"phase_tolerance", 1e-10}, {"isometry_tolerance", 1e-6},
        {"kernel_tolerance", 1e-6}}},
      {"toeplitz-assembly",
       {{"N", 32}, {"kmax", 30}, {"diagonal_tolerance", 1e-10}, {"points", 20}, {"radius", 3.0},
        {"berezin_tolerance", 1e-8}}},
      {"heat", {{"points", 20}, {"quadrature_points", 6}, {"radius", 3.0}, {"s", 0.6}, {"tolerance", 1e-8}}},
      {"correspondence", {{"N", {24, 32}}, {"tolerance", 1e-3}}},
      {"wiener", {{"orders", {1, 2, 4}}, {"basis_N", 16}}},
      {"trace-identity", {{"N", 60}, {"s", {0.6, 0.75, 0.9}}, {"z", {0.0, 1.0}}, {"tolerance", 1e-8}}},
      {"berger-coburn", {{"N", {24, 48}}, {"forward_s", 0.4}, {"reverse_s", {0.8, 1.5}}, {"stability", 0.01}}},
      {"dilation", {{"N", 24}, {"lambdas", {0.5, 2.0}}, {"tolerance", 1e-9}, {"radius", 1.0}}},
      {"limits", {{"directions", 8}, {"tolerance", 1e-6}, {"operator_N", 24}, {"operator_tolerance", 1e-2}}},
      {"spectrum",
       {{"N", 128}, {"radii", {4.0, 6.0, 8.0}}, {"directions", 16}, {"circle_tolerance", 1e-6},
        {"lambda_pass", 3.0}, {"lambda_fail", 1.0}}},
      {"compactness",
       {{"ladder", {48, 96}}, {"radii", {4.0, 6.0, 8.0}}, {"k", 40}, {"sv_tolerance", 1e-8},
        {"tail_tolerance", 1e-10}}},
      {"esscen", {{"ladder", {64, 128}}, {"radii", {4.0, 6.0, 8.0}}}},
  };
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar: {
      const std::string s = node.Scalar();
      if (node.Tag() == "!") return s;  // quoted
      if (s == "true" || s == "True") return true;
      if (s == "false" || s == "False") return false;
      try {
        std::size_t pos = 0;
        const long long i = std::stoll(s, &pos);
        if (pos == s.size()) return i;
      } catch (const std::exception&) {
      }
      try {
        std::size_t pos = 0;
        const double d = std::stod(s, &pos);
        if (pos == s.size()) return d;
      } catch (const std::exception&) {
      }
      return s;
    }
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& e : node) arr.push_back(yaml_to_json(e));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
  }
  return nullptr;
}

void require_only(const json& obj, const std::vector<std::string>& keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a mapping");
  for (const auto& [k, v] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      std::string allowed;
      for (const auto& a : keys) allowed += (allowed.empty() ? "" : ", ") + a;
      throw ConfigError(where + ": unknown key '" + k + "' (allowed: " + allowed + ")");
    }
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

/// Overrides must match the type of the default (numbers, integers or lists).
void merge_params(json& base, const json& over, const std::string& where) {
  if (!over.is_object()) throw ConfigError(where + ": expected a mapping");
  for (const auto& [k, v] : over.items()) {
    if (!base.contains(k)) {
      std::string allowed;
      for (const auto& [a, unused] : base.items()) allowed += (allowed.empty() ? "" : ", ") + a;
      throw ConfigError(where + ": unknown key '" + k + "' (allowed: " + allowed + ")");
    }
    const json& d = base.at(k);
    const bool ok = (d.is_number_integer() && v.is_number_integer()) ||
                    (d.is_number_float() && v.is_number()) ||
                    (d.is_array() && v.is_array() && !v.empty() &&
                     std::all_of(v.begin(), v.end(), [&](const json& e) {
                       return d.front().is_number_integer() ? e.is_number_integer() : e.is_number();
                     }));
    if (!ok) throw ConfigError(where + "." + k + ": expected " + std::string(d.is_array() ? "a non-empty list of " : "") +
                               (d.is_array() ? (d.front().is_number_integer() ? "integers" : "numbers")
                                             : (d.is_number_integer() ? "an integer" : "a number")));
    base[k] = d.is_number_float() ? json(v.get<double>()) : v;
  }
}

bool suite_supports_n(const std::string& s) {
  return s == "kernels-weyl" || s == "toeplitz-assembly" || s == "dilation";
}

std::vector<std::string> selected_suites(const std::string& suite) {
  std::vector<std::string> out;
  for (const SuiteInfo& s : suite_catalog())
    if (suite == "full" || suite == s.name) out.push_back(s.name);
  return out;
}

void validate_suite_params(const std::string& name, const json& p, const Config& c) {
  const std::string where = "suites." + name;
  auto positive = [&](const char* key) {
    for (const json& v : p.at(key).is_array() ? p.at(key) : json::array({p.at(key)}))
      if (!(v.get<double>() > 0.0)) throw ConfigError(where + "." + key + ": must be positive");
  };
  for (const auto& [k, v] : p.items())
    if (k.find("tolerance") != std::string::npos || k == "stability") positive(k.c_str());
  if (name == "trace-identity") {
    positive("N");
    for (const json& s : p.at("s")) {
      const double x = s.get<double>();
      if (x <= 0.5) {
        throw ConfigError(where + ".s: s = " + num(x) +
                          " t makes the series sum_k (1 - t/s)^k of T_0^(s) diverge; need t/2 < s <= t");
      }
      if (x > 1.0) throw ConfigError(where + ".s: s = " + num(x) + " t exceeds t; need t/2 < s <= t");
    }
  }
  if (name == "berger-coburn") {
    const double fs = p.at("forward_s").get<double>();
    if (!(fs > 0.0 && fs < 0.5)) throw ConfigError(where + ".forward_s: need 0 < s < t/2 (in units of t)");
    for (const json& s : p.at("reverse_s")) {
      const double x = s.get<double>();
      if (!(x > 0.5 && x < 2.0)) throw ConfigError(where + ".reverse_s: need t/2 < s < 2t (in units of t)");
    }
    if (p.at("N").size() != 2) throw ConfigError(where + ".N: expected two truncation degrees");
  }
  if (name == "correspondence" && p.at("N").size() != 2)
    throw ConfigError(where + ".N: expected two truncation degrees");
  if (name == "wiener") {
    for (const json& o : p.at("orders"))
      if (o.get<int>() < 1) throw ConfigError(where + ".orders: orders must be >= 1");
    if (c.t <= 0.0) throw ConfigError("fock.t: must be positive");
  }
  if (name == "dilation")
    for (const json& l : p.at("lambdas"))
      if (!(l.get<double>() > 0.0)) throw ConfigError(where + ".lambdas: must be positive");
}

}  // namespace

json yaml_text_to_json(const std::string& text) {
  try {
    return yaml_to_json(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML: ") + e.what());
  }
}

Config parse_config(const json& doc) {
  Config c;
  if (doc.is_null()) throw ConfigError("config: empty document");
  require_only(doc, {"schema", "suite", "seed", "tolerance_scale", "fock", "symbols", "quadrature", "output", "wiener",
                     "suites"},
               "config");
  if (!doc.contains("schema")) throw ConfigError("config: missing 'schema'");
  if (get_int(doc, "schema", "config") != kSchemaVersion)
    throw ConfigError("config.schema: unsupported version " + doc.at("schema").dump() + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  if (doc.contains("suite")) {
    if (!doc.at("suite").is_string()) throw ConfigError("config.suite: expected a name");
    c.suite = doc.at("suite").get<std::string>();
  }
  if (c.suite != "full" && selected_suites(c.suite).empty()) throw ConfigError("config.suite: unknown suite '" + c.suite + "'");
  if (doc.contains("seed")) {
    const json& seed = doc.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) throw ConfigError("config.seed: expected a nonnegative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("tolerance_scale")) {
    c.toleranceScale = get_number(doc, "tolerance_scale", "config");
    if (!(c.toleranceScale > 0.0)) throw ConfigError("config.tolerance_scale: must be positive");
  }
  if (doc.contains("fock")) {
    const json& f = doc.at("fock");
    require_only(f, {"t", "n", "N"}, "fock");
    if (f.contains("t")) c.t = get_number(f, "t", "fock");
    if (f.contains("n")) c.n = get_int(f, "n", "fock");
    if (f.contains("N")) c.N = get_int(f, "N", "fock");
    if (!(c.t > 0.0)) throw ConfigError("fock.t: must be positive");
    if (c.n < 1 || c.n > kMaxDimension) throw ConfigError("fock.n: must be in [1, " + std::to_string(kMaxDimension) + "]");
    if (c.N < 2) throw ConfigError("fock.N: must be at least 2");
  }
  if (doc.contains("symbols")) {
    if (!doc.at("symbols").is_array()) throw ConfigError("config.symbols: expected a list");
    c.symbols = doc.at("symbols");
    for (const json& s : c.symbols) {
      try {
        (void)symbol_from_json(s);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("config.symbols: ") + e.what());
      }
    }
  }
  if (doc.contains("quadrature")) {
    c.quadrature = doc.at("quadrature");
    require_only(c.quadrature, {"nodes_per_panel", "panel_width", "angular_count", "tail_tolerance"}, "quadrature");
    for (const auto& [k, v] : c.quadrature.items())
      if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("quadrature." + k + ": expected a positive number");
  }
  if (doc.contains("output")) {
    require_only(doc.at("output"), {"dir"}, "output");
    if (doc.at("output").contains("dir")) {
      if (!doc.at("output").at("dir").is_string()) throw ConfigError("output.dir: expected a path");
      c.outDir = doc.at("output").at("dir").get<std::string>();
    }
  }
  if (const char* env = std::getenv("FOCKLAB_WIENER_CACHE")) c.wienerCacheDir = env;
  if (doc.contains("wiener")) {
    require_only(doc.at("wiener"), {"cache_dir"}, "wiener");
    if (doc.at("wiener").contains("cache_dir")) {
      if (!doc.at("wiener").at("cache_dir").is_string()) throw ConfigError("wiener.cache_dir: expected a path");
      c.wienerCacheDir = doc.at("wiener").at("cache_dir").get<std::string>();
    }
  }

  c.suites = suite_defaults();
  if (doc.contains("suites")) {
    const json& s = doc.at("suites");
    if (!s.is_object()) throw ConfigError("config.suites: expected a mapping");
    for (const auto& [name, params] : s.items()) {
      if (!c.suites.contains(name)) throw ConfigError("config.suites: unknown suite '" + name + "'");
      merge_params(c.suites[name], params, "suites." + name);
    }
  }
  for (const std::string& name : selected_suites(c.suite)) {
    if (c.n != 1 && !suite_supports_n(name))
      throw ConfigError("suite '" + name + "' supports fock.n = 1 only");
    validate_suite_params(name, c.suites.at(name), c);
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(yaml_text_to_json(ss.str()));
}

json config_to_json(const Config& c) {
  return json{{"schema", kSchemaVersion}, {"suite", c.suite},      {"seed", c.seed},
              {"tolerance_scale", c.toleranceScale},                {"fock", {{"t", c.t}, {"n", c.n}, {"N", c.N}}},
              {"symbols", c.symbols},     {"quadrature", c.quadrature}, {"suites", c.suites}};
}

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c.at("passed").get<bool>(); });
}

// ---------------------------------------------------------------------------
// Suite helpers

namespace {

using Clock = std::chrono::steady_clock;

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

/// A suite context: parameters, a seeded generator and a check recorder.
class Ctx {
 public:
  Ctx(const Config& cfg, const std::string& suite, SuiteResult& out)
      : cfg(cfg), p(cfg.suites.at(suite)), out_(out), rng_(cfg.seed ^ std::hash<std::string>{}(suite)) {}

  double tol(const char* key) const { return p.at(key).get<double>() * cfg.toleranceScale; }
  int integer(const char* key) const { return p.at(key).get<int>(); }
  double number(const char* key) const { return p.at(key).get<double>(); }
  std::vector<double> numbers(const char* key) const { return p.at(key).get<std::vector<double>>(); }
  std::vector<int> integers(const char* key) const { return p.at(key).get<std::vector<int>>(); }

  /// Uniform point in the ball |z| <= R of C^n.
  Point random_point(int n, double R) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point z(n);
    for (int j = 0; j < n; ++j) z[j] = Complex(g(rng_), g(rng_));
    const double r = R * std::pow(u(rng_), 1.0 / (2.0 * n));
    return (r / z.norm()) * z;
  }

  /// Values below tolerance pass; NaN fails.
  void check(const std::string& name, const std::string& anchor, double value, double tolerance, json extra = {}) {
    json values = extra.is_null() ? json::object() : extra;
    values["value"] = finite_or(value, -1.0);
    record(name, anchor, values, tolerance, std::isfinite(value) && value <= tolerance);
  }

  void record(const std::string& name, const std::string& anchor, json values, double tolerance, bool passed) {
    out_.checks.push_back(json{{"name", name},
                               {"anchor", anchor},
                               {"values", std::move(values)},
                               {"tolerance", tolerance},
                               {"passed", passed}});
  }

  void table(Table t) { out_.tables.push_back(std::move(t)); }

  const Config& cfg;
  const json& p;

 private:
  SuiteResult& out_;
  std::mt19937_64 rng_;
};

json cplx(Complex c) { return json::array({c.real(), c.imag()}); }

std::vector<Symbol> configured_symbols(const Config& cfg, std::vector<Symbol> defaults) {
  if (cfg.symbols.empty()) return defaults;
  std::vector<Symbol> out;
  for (const json& s : cfg.symbols) out.push_back(symbol_from_json(s));
  return out;
}

quad::SchemeOptions scheme_options(const Config& cfg) {
  quad::SchemeOptions o;
  const json& q = cfg.quadrature;
  if (q.contains("nodes_per_panel")) o.nodesPerPanel = q.at("nodes_per_panel").get<int>();
  if (q.contains("panel_width")) o.panelWidth = q.at("panel_width").get<double>();
  if (q.contains("angular_count")) o.angularCount = q.at("angular_count").get<int>();
  if (q.contains("tail_tolerance")) o.tailTolerance = q.at("tail_tolerance").get<double>();
  return o;
}

/// Strict decrease with a roundoff floor.
bool decreasing(double before, double after, double floor = 1e-12) {
  return after < before || (after <= floor && before <= floor);
}

Symbol as_callable(const Symbol& f) {
  return Symbol::callable([f](const Point& z) { return f(z); }, f.bound(), TagSet{SymbolTag::Bounded}, "wrapped");
}

// ---------------------------------------------------------------------------
// basis-norms

void suite_basis_norms(Ctx& ctx) {
  const int kmax = ctx.integer("kmax");
  const double tol = ctx.tol("tolerance");
  const BasisPtr basis = MultiIndexBasis::make(ctx.cfg.t, 1, kmax);
  Table tab{"basis_norms.csv", {"k", "closed_p1", "quad_p1", "closed_pinf", "quad_pinf", "product", "product_formula"}, {}};
  double err1 = 0.0, errInf = 0.0, errProd = 0.0, errQuadProd = 0.0, supProd = 0.0;
  int argSup = -1;
  for (int k = 0; k <= kmax; ++k) {
    TruncatedVector v(basis);
    v.coeffs(k) = 1.0;
    const double q1 = fp_norm(v, NormExponent::One);
    const double qi = fp_norm(v, NormExponent::Infinity);
    const double c1 = basis_norm_1d(NormExponent::One, k);
    const double ci = basis_norm_1d(NormExponent::Infinity, k);
    const double prod = c1 * ci;
    const double formula = basis_norm_product_formula(k);
    err1 = std::max(err1, std::abs(q1 - c1) / c1);
    errInf = std::max(errInf, std::abs(qi - ci) / ci);
    errProd = std::max(errProd, std::abs(prod - formula) / formula);
    errQuadProd = std::max(errQuadProd, std::abs(q1 * qi - formula) / formula);
    if (prod > supProd) {
      supProd = prod;
      argSup = k;
    }
    tab.rows.push_back({double(k), c1, q1, ci, qi, prod, formula});
  }
  const auto& a = suite_catalog()[0].anchors;
  ctx.check("F1 norms: quadrature vs closed form", a[0], err1, tol, {{"kmax", kmax}, {"metric", "max relative error"}});
  ctx.check("Finf norms: quadrature vs closed form", a[1], errInf, tol, {{"kmax", kmax}, {"metric", "max relative error"}});
  ctx.check("product of closed forms vs product formula", a[2], errProd, 1e-12 * ctx.cfg.toleranceScale,
            {{"metric", "max relative error"}});
  ctx.check("product of quadrature norms vs product formula", a[2], errQuadProd, 2.0 * tol,
            {{"metric", "max relative error"}});
  const double limitGap = std::abs(basis_norm_product_formula(kmax) - 1.0 / std::sqrt(2.0));
  ctx.check("product approaches 1/sqrt(2) at kmax", a[2], limitGap, ctx.tol("limit_tolerance"),
            {{"k", kmax}, {"product", basis_norm_product_formula(kmax)}});
  ctx.record("product bounded by 1, attained at k = 0", a[2], {{"sup", supProd}, {"argmax", argSup}}, 1e-12,
             argSup == 0 && std::abs(supProd - 1.0) <= 1e-12);
  ctx.table(std::move(tab));
}

// ---------------------------------------------------------------------------
// kernels-weyl

std::vector<Point> weyl_grid(int n, int m, double radius, double phase0) {
  std::vector<Point> pts;
  for (int i = 0; i < m; ++i) {
    const double r = m == 1 ? radius : radius * i / (m - 1);
    Point z(n);
    for (int j = 0; j < n; ++j) z[j] = std::polar(r / std::sqrt(double(n)), phase0 + 0.7 * i + 1.3 * j);
    pts.push_back(z);
  }
  return pts;
}

void suite_kernels_weyl(Ctx& ctx) {
  const auto& a = suite_catalog()[1].anchors;
  const double t = ctx.cfg.t;
  const int n = ctx.cfg.n;
  const int N = ctx.integer("N");
  const BasisPtr basis = MultiIndexBasis::make(t, n, N);
  const auto zs = weyl_grid(n, ctx.integer("grid"), ctx.number("radius"), 0.0);
  const auto ws = weyl_grid(n, ctx.integer("grid"), ctx.number("radius"), 0.4);

  double phaseErr = 0.0, modulusErr = 0.0, cornerErr = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const OperatorMatrix wz = weyl_matrix(basis, zs[i]);
    cornerErr = std::max(cornerErr, std::abs(wz(0, 0) - std::exp(-zs[i].norm2() / (2.0 * t))));
    for (const Point& w : ws) {
      const Complex prod = (wz * weyl_matrix(basis, w))(0, 0);
      const Complex ratio = prod / weyl_matrix(basis, zs[i] + w)(0, 0);
      phaseErr = std::max(phaseErr, std::abs(ratio - weyl_composition_phase(t, zs[i], w)));
      modulusErr = std::max(modulusErr, std::abs(std::abs(ratio) - 1.0));
    }
  }
  const double phaseTol = ctx.tol("phase_tolerance");
  ctx.check("composition phase exp(-i Im(z.conj(w))/t)", a[2], phaseErr, phaseTol,
            {{"pairs", zs.size() * ws.size()}, {"N", N}});
  ctx.check("composition ratio has modulus 1", a[2], modulusErr, phaseTol);
  ctx.check("W_z[0,0] = exp(-|z|^2/2t)", a[3], cornerErr, 1e-14 * ctx.cfg.toleranceScale);

  // Shifts move mass across the cutoff, so the degree <= N/2 block is read
  // from truncations of degree N and 2N; the defect must shrink.
  const Point zc = zs.back();
  const double isoTol = ctx.tol("isometry_tolerance");
  json isoProfile = json::array(), invProfile = json::array();
  double isoPrev = std::numeric_limits<double>::infinity(), invPrev = isoPrev;
  bool isoDecreasing = true, invDecreasing = true;
  for (int M : {N, 2 * N}) {
    const BasisPtr b = MultiIndexBasis::make(t, n, M);
    const OperatorMatrix w = weyl_matrix(b, zc);
    const Eigen::MatrixXcd gram = (w.adjoint() * w).block(N / 2);
    const Eigen::MatrixXcd inv = (w * weyl_matrix(b, -zc)).block(N / 2);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
    const double isoErr = spectral_norm(gram - id), invErr = spectral_norm(inv - id);
    isoProfile.push_back({{"N", M}, {"error", isoErr}});
    invProfile.push_back({{"N", M}, {"error", invErr}});
    isoDecreasing = isoDecreasing && decreasing(isoPrev, isoErr);
    invDecreasing = invDecreasing && decreasing(invPrev, invErr);
    isoPrev = isoErr;
    invPrev = invErr;
  }
  ctx.record("W_z^* W_z = Id on the degree <= N/2 block, decreasing with the truncation", a[3],
             {{"profile", isoProfile}, {"block_degree", N / 2}}, isoTol, isoDecreasing && isoPrev <= isoTol);
  ctx.record("W_z W_{-z} = Id on the degree <= N/2 block, decreasing with the truncation", a[3],
             {{"profile", invProfile}, {"block_degree", N / 2}}, isoTol, invDecreasing && invPrev <= isoTol);

  // Kernels.
  double normErr = 0.0;
  for (const Point& z : zs) {
    const KernelExpansion k = kernel_expand(basis, z);
    const double full = std::sqrt(k.vector.coeffs.squaredNorm() + k.truncationError * k.truncationError);
    normErr = std::max(normErr, std::abs(full - std::exp(z.norm2() / (2.0 * t))) / std::exp(z.norm2() / (2.0 * t)));
  }
  ctx.check("||K_z||_2 = exp(|z|^2/2t)", a[0], normErr, 1e-12 * ctx.cfg.toleranceScale);
  Point unit(n);
  unit[0] = 1.0;
  const KernelExpansion k0 = kernel_expand(MultiIndexBasis::make(t, n, 0), unit);
  const double expected = std::exp(1.0 / t) - 1.0;
  ctx.check("N = 0 kernel truncation error^2 = e^{|z|^2/t} - 1", a[0],
            std::abs(k0.truncationError * k0.truncationError - expected) / expected, 1e-12 * ctx.cfg.toleranceScale);

  double pErr = 0.0;
  for (const Point& z : {unit, weyl_grid(n, 3, 1.2, 0.5).back()}) {
    const KernelExpansion k = normalized_kernel_expand(basis, z);
    for (NormExponent p : {NormExponent::One, NormExponent::Two, NormExponent::Infinity})
      pErr = std::max(pErr, std::abs(fp_norm(k.vector, p) - 1.0));
  }
  ctx.check("||k_z||_p = 1 for p = 1, 2, inf", a[1], pErr, ctx.tol("kernel_tolerance"));

  // Reproducing property for random polynomials.
  std::normal_distribution<double> g;
  double repErr = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    TruncatedVector f(basis);
    for (Eigen::Index i = 0; i < basis->dim(); ++i) {
      const Point r = ctx.random_point(1, 1.0);
      f.coeffs(i) = r[0] / std::sqrt(1.0 + basis->degree_of(i));
    }
    const Point z = ctx.random_point(n, 2.0);
    const Complex pairing = kernel_expand(basis, z).vector.coeffs.dot(f.coeffs);
    repErr = std::max(repErr, std::abs(pairing - f(z)) / std::max(1.0, std::abs(f(z))));
  }
  ctx.check("<f, K_z> = f(z) for polynomials of degree <= N", a[0], repErr, 1e-12 * ctx.cfg.toleranceScale);

  if (n == 1) {
    const BasisPtr small = MultiIndexBasis::make(t, 1, 16);
    double diff = 0.0;
    for (const Point& z : weyl_grid(1, 3, 1.5, 0.3)) {
      const WeylQuadrature q = weyl_matrix_quadrature(small, z);
      diff = std::max(diff, (q.matrix.entries() - weyl_matrix(small, z).entries()).cwiseAbs().maxCoeff());
    }
    ctx.check("Weyl closed form vs Gauss-Hermite quadrature", a[3], diff, 1e-9 * ctx.cfg.toleranceScale, {{"N", 16}});
  }
}

// ---------------------------------------------------------------------------
// toeplitz-assembly

void suite_toeplitz(Ctx& ctx) {
  const auto& a = suite_catalog()[2].anchors;
  const double t = ctx.cfg.t;
  const int n = ctx.cfg.n;
  const int N = ctx.integer("N");
  const int kmax = ctx.integer("kmax");
  const quad::SchemeOptions opts = scheme_options(ctx.cfg);

  const double aG = 1.0;
  const BasisPtr db = MultiIndexBasis::make(t, n, std::max(N, kmax));
  const OperatorMatrix tg = toeplitz_matrix(Symbol::gaussian(aG), db, opts);
  double diagErr = 0.0, offDiag = 0.0;
  for (Eigen::Index i = 0; i < db->dim(); ++i) {
    const int k = db->degree_of(i);
    if (k > kmax) continue;
    const double d = std::pow(aG / (aG + t), k + n);
    diagErr = std::max(diagErr, std::abs(tg(i, i) - d) / d);
    for (Eigen::Index j = 0; j < db->dim(); ++j)
      if (j != i) offDiag = std::max(offDiag, std::abs(tg(i, j)));
  }
  ctx.check("Gaussian symbol diagonal (a/(a+t))^{|alpha|+n}", a[0], diagErr, ctx.tol("diagonal_tolerance"),
            {{"kmax", kmax}, {"metric", "max relative error"}});
  ctx.check("Gaussian symbol off-diagonal entries vanish", a[0], offDiag, 1e-13 * ctx.cfg.toleranceScale);

  std::vector<Symbol> defaults;
  if (n == 1) {
    defaults = {Symbol::gaussian(1.0), Symbol::angular({{1, 1.0}}, 1.0), Symbol::oscillatory(0.5), Symbol::sin_sqrt()};
  } else {
    Point u(n);
    u[0] = 1.0;
    u[n - 1] += Complex(0.0, 0.5);
    defaults = {Symbol::gaussian(1.0), Symbol::plane_wave(u)};
  }
  const std::vector<Symbol> symbols = configured_symbols(ctx.cfg, defaults);
  const BasisPtr basis = MultiIndexBasis::make(t, n, N);
  const double btol = ctx.tol("berezin_tolerance");
  Table tab{"berezin_heat.csv", {"symbol", "re_z1", "im_z1", "re_berezin", "im_berezin", "re_heat", "im_heat"}, {}};
  for (std::size_t si = 0; si < symbols.size(); ++si) {
    const Symbol& f = symbols[si];
    const std::string label = f.describe();
    const ToeplitzAssembly ta = toeplitz_assemble(f, basis, opts);
    const BerezinEvaluator ev(ta.matrix);
    double err = 0.0;
    for (int i = 0; i < ctx.integer("points"); ++i) {
      const Point z = ctx.random_point(n, ctx.number("radius"));
      const Complex b = ev(z).value;
      const Complex h = heat_transform(f, t, z).value;
      err = std::max(err, std::abs(b - h));
      tab.rows.push_back({double(si), z[0].real(), z[0].imag(), b.real(), b.imag(), h.real(), h.imag()});
    }
    ctx.check("Berezin transform of T_f vs heat transform: " + label, a[1], err, btol,
              {{"N", N}, {"method", ta.method}, {"points", ctx.integer("points")}});
    if (symbol_is_real(f)) {
      const double asym = (ta.matrix.entries() - ta.matrix.entries().adjoint()).cwiseAbs().maxCoeff();
      ctx.check("real symbol gives a Hermitian matrix: " + label, a[1], asym, 1e-13 * ctx.cfg.toleranceScale);
    }
    if (n == 1 && ta.method != "polar-quadrature") {
      const OperatorMatrix other = toeplitz_matrix(as_callable(f), basis, opts);
      const double d = (other.half_block() - ta.matrix.half_block()).cwiseAbs().maxCoeff();
      ctx.check("structured assembly vs generic polar quadrature: " + label, a[1], d, btol, {{"method", ta.method}});
    }
  }
  ctx.table(std::move(tab));
}

// ---------------------------------------------------------------------------
// heat

void suite_heat(Ctx& ctx) {
  const auto& a = suite_catalog()[3].anchors;
  const double s = ctx.number("s");
  const double tol = ctx.tol("tolerance");
  const int points = ctx.integer("points");
  const double R = ctx.number("radius");

  const std::vector<Symbol> symbols = configured_symbols(
      ctx.cfg, {Symbol::gaussian(1.0), Symbol::poly_gaussian({1.0, Complex(0.5, 0.2), 0.3}, 1.0),
                Symbol::oscillatory(1.0), Symbol::plane_wave(Point{Complex(0.6, -0.8)}),
                Symbol::angular({{1, 1.0}, {-2, Complex(0.0, 0.5)}}, 1.0), Symbol::sin_sqrt(),
                Symbol::smooth_sign(Point{1.0}, 1.0)});
  Table tab{"heat.csv", {"symbol", "re_z", "im_z", "re_direct", "im_direct", "re_quadrature", "im_quadrature"}, {}};
  for (std::size_t si = 0; si < symbols.size(); ++si) {
    const Symbol& f = symbols[si];
    const Symbol generic = as_callable(f);
    double err = 0.0, bound = 0.0;
    std::string method;
    for (int i = 0; i < ctx.integer("quadrature_points"); ++i) {
      const Point z = ctx.random_point(1, R);
      const HeatValue d = heat_transform(f, s, z);
      const HeatValue q = heat_transform(generic, s, z);
      err = std::max(err, std::abs(d.value - q.value));
      bound = std::max(bound, q.errorBound);
      method = d.method == HeatMethod::ClosedForm ? "closed-form" : "quadrature";
      tab.rows.push_back({double(si), z[0].real(), z[0].imag(), d.value.real(), d.value.imag(), q.value.real(),
                          q.value.imag()});
    }
    ctx.check("heat transform vs generic quadrature: " + f.describe(), a[0], err, tol,
              {{"s", s}, {"method", method}, {"quadrature_error_bound", bound}});
  }
  ctx.table(std::move(tab));

  double gaussErr = 0.0;
  for (int i = 0; i < points; ++i) {
    const Point z = ctx.random_point(1, R);
    const double exact = (1.0 / (1.0 + s)) * std::exp(-z.norm2() / (1.0 + s));
    gaussErr = std::max(gaussErr, std::abs(heat_transform(Symbol::gaussian(1.0), s, z).value - exact));
  }
  ctx.check("Gaussian heat transform a/(a+s) exp(-|z|^2/(a+s))", a[0], gaussErr, 1e-14 * ctx.cfg.toleranceScale);

  double semi = 0.0;
  for (const Symbol& f : {Symbol::poly_gaussian({1.0, Complex(0.5, 0.2), 0.3}, 1.0), Symbol::oscillatory(2.0),
                          Symbol::plane_wave(Point{Complex(0.3, 1.1)})}) {
    const Symbol composed = heat_symbol(heat_symbol(f, 0.3 * s, 1), 0.7 * s, 1);
    for (int i = 0; i < points; ++i) {
      const Point z = ctx.random_point(1, R);
      semi = std::max(semi, std::abs(composed(z) - heat_transform(f, s, z).value));
    }
  }
  ctx.check("semigroup law on closed-form families", a[1], semi, tol);

  // Semigroup through quadrature: f^(r) evaluated pointwise, then smoothed again.
  const Symbol ang = Symbol::angular({{1, 1.0}}, 1.0);
  const Symbol inner = as_callable(heat_symbol(ang, 0.5 * s, 1));
  double nested = 0.0;
  {
    const Point z = ctx.random_point(1, R);
    nested = std::max(nested, std::abs(heat_transform(inner, 0.5 * s, z).value - heat_transform(ang, s, z).value));
  }
  ctx.check("semigroup law through nested quadrature (angular symbol)", a[1], nested, tol);

  const double sup = heat_sup(Symbol::gaussian(1.0), s, 1);
  ctx.check("sup of the Gaussian heat transform = a/(a+s)", a[0], std::abs(sup - 1.0 / (1.0 + s)),
            1e-14 * ctx.cfg.toleranceScale);
}

// ---------------------------------------------------------------------------
// correspondence

struct TestOperator {
  std::string name;
  OperatorFactory make;
  Symbol berezin;
};

std::vector<TestOperator> correspondence_set(double t) {
  const Symbol g = Symbol::gaussian(1.0);
  const Symbol ang = Symbol::angular({{1, 1.0}}, 1.0);
  const Symbol osc = Symbol::oscillatory(0.5);
  return {
      {"T_gaussian(1)", [g](const BasisPtr& b) { return toeplitz_matrix(g, b); }, heat_symbol(g, t, 1)},
      {"T_angular(e^{i theta})", [ang](const BasisPtr& b) { return toeplitz_matrix(ang, b); }, heat_symbol(ang, t, 1)},
      {"T_oscillatory(0.5)", [osc](const BasisPtr& b) { return toeplitz_matrix(osc, b); }, heat_symbol(osc, t, 1)},
      {"rank_one(1, 1)",
       [](const BasisPtr& b) {
         TruncatedVector one(b);
         one.coeffs(0) = 1.0;
         return rank_one(one, one);
       },
       Symbol::gaussian(t)},
      {"K_0.5", [](const BasisPtr& b) { return k_s_matrix(b, 0.5); }, Symbol::gaussian(2.0 * t)},
  };
}

void suite_correspondence(Ctx& ctx) {
  const auto& a = suite_catalog()[4].anchors;
  const double t = ctx.cfg.t;
  const std::vector<int> Ns = ctx.integers("N");
  const double tol = ctx.tol("tolerance");
  const Symbol gt = heat_kernel(t, 1);
  Table tab{"correspondence.csv", {"operator", "N", "relative_half_block_error"}, {}};
  const auto set = correspondence_set(t);
  for (std::size_t oi = 0; oi < set.size(); ++oi) {
    const TestOperator& op = set[oi];
    std::vector<double> errs;
    for (int N : Ns) {
      const BasisPtr basis = MultiIndexBasis::make(t, 1, N);
      const OperatorMatrix conv = module_conv_padded(gt, op.make, basis, N / 2);
      const OperatorMatrix ref = toeplitz_matrix(op.berezin, basis);
      const Eigen::MatrixXcd refBlock = ref.half_block();
      errs.push_back(spectral_norm(conv.half_block() - refBlock) / spectral_norm(refBlock));
      tab.rows.push_back({double(oi), double(N), errs.back()});
    }
    ctx.check("g_t * A = T_{B(A)} at N = " + std::to_string(Ns[0]) + ": " + op.name, a[0], errs[0], tol,
              {{"working_padding", "N/2"}});
    ctx.record("error decreases from N = " + std::to_string(Ns[0]) + " to " + std::to_string(Ns[1]) + ": " + op.name,
               a[0], {{"errors", errs}}, 1e-12, decreasing(errs[0], errs[1]));
  }
  ctx.table(std::move(tab));
}

// ---------------------------------------------------------------------------
// wiener

void suite_wiener(Ctx& ctx) {
  const auto& a = suite_catalog()[5].anchors;
  const double t = ctx.cfg.t;
  WienerSearchParams params;
  params.cacheDir = ctx.cfg.wienerCacheDir;
  const BasisPtr basis = MultiIndexBasis::make(t, 1, ctx.integer("basis_N"));
  Table wt{"wiener.csv", {"N", "l1_error", "quadrature_value", "resolution_diff", "tail_bound", "seed_l1_error", "terms"}, {}};
  Table rt{"reconstruction.csv", {"operator", "N", "distance", "full_distance", "heat_distance", "wiener_term",
                                  "truncation_term"}, {}};
  const auto ops = correspondence_set(t);
  const std::vector<TestOperator> recon{
      {"Id", [](const BasisPtr& b) { return OperatorMatrix::identity(b); }, Symbol::constant(1.0)}, ops[0], ops[4]};
  for (int N : ctx.integers("orders")) {
    const WienerApproximant w = wiener_coefficients(t, N, params);
    ctx.record("certified L1 error <= 1/N at N = " + std::to_string(N), a[0],
               {{"l1_error", w.l1Error},
                {"quadrature_value", w.quadratureValue},
                {"resolution_diff", w.resolutionDiff},
                {"tail_bound", w.tailBound},
                {"level", w.level},
                {"terms", w.coeffs.size()}},
               1.0 / N, w.certified && w.l1Error <= 1.0 / N);
    wt.rows.push_back({double(N), w.l1Error, w.quadratureValue, w.resolutionDiff, w.tailBound, w.seedL1Error,
                       double(w.coeffs.size())});
    for (std::size_t oi = 0; oi < recon.size(); ++oi) {
      const Reconstruction r = reconstruct(recon[oi].make, recon[oi].berezin, w, basis);
      ctx.record("reconstruction error chain at N = " + std::to_string(N) + ": " + recon[oi].name, a[1],
                 {{"distance", r.distance},
                  {"heat_distance", r.heatDistance},
                  {"wiener_term", r.wienerTerm},
                  {"truncation_term", r.truncationTerm}},
                 r.heatDistance + r.wienerTerm + r.truncationTerm, r.chainHolds);
      rt.rows.push_back({double(oi), double(N), r.distance, r.fullDistance, r.heatDistance, r.wienerTerm,
                         r.truncationTerm});
    }
  }
  ctx.table(std::move(wt));
  ctx.table(std::move(rt));
}

// ---------------------------------------------------------------------------
// trace-identity

void suite_trace(Ctx& ctx) {
  const auto& a = suite_catalog()[6].anchors;
  const double t = ctx.cfg.t;
  const BasisPtr basis = MultiIndexBasis::make(t, 1, ctx.integer("N"));
  const double tol = ctx.tol("tolerance");
  Table tab{"trace_identity.csv", {"symbol", "s", "z", "re_lhs", "im_lhs", "re_rhs", "im_rhs", "gap", "tail"}, {}};
  const std::vector<std::pair<std::string, Symbol>> fs{{"1", Symbol::constant(1.0)},
                                                       {"gaussian(1)", Symbol::gaussian(1.0)}};
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    for (double sf : ctx.numbers("s")) {
      for (double x : ctx.numbers("z")) {
        const TraceIdentity ti = trace_heat_identity(fs[fi].second, sf * t, Point{Complex(x)}, basis);
        ctx.check("trace identity f = " + fs[fi].first + ", s = " + num(sf) + " t, z = " + num(x),
                  a[0], ti.gap, tol, {{"lhs", cplx(ti.lhs)}, {"rhs", cplx(ti.rhs)}, {"truncation_tail", ti.truncationTail}});
        tab.rows.push_back({double(fi), sf, x, ti.lhs.real(), ti.lhs.imag(), ti.rhs.real(), ti.rhs.imag(), ti.gap,
                            ti.truncationTail});
      }
    }
  }
  for (double sf : ctx.numbers("s")) {
    const TraceIdentity ti = trace_heat_identity(Symbol::constant(1.0), sf * t, Point{Complex(0.0)}, basis);
    ctx.check("f = 1 reproduces the geometric series value 1, s = " + num(sf) + " t", a[0],
              std::abs(ti.rhs - 1.0), tol, {{"rhs", cplx(ti.rhs)}});
    const T0Operator t0 = t0_build(sf * t, t, basis, NormExponent::One);
    ctx.record("nuclear norm bound of T_0^(s) finite (p = 1), s = " + num(sf) + " t", a[1],
               {{"bound", t0.nuclearNormBound}, {"sup_product", t0.supProduct}}, 0.0,
               std::isfinite(t0.nuclearNormBound));
  }
  ctx.table(std::move(tab));
}

// ---------------------------------------------------------------------------
// berger-coburn

std::vector<Symbol> bc_family() {
  std::vector<Symbol> fam;
  for (double a : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0}) fam.push_back(Symbol::gaussian(a));
  fam.push_back(Symbol::angular({{1, 1.0}}, 1.0));
  fam.push_back(Symbol::angular({{-1, 1.0}}, 1.0));
  fam.push_back(Symbol::angular({{1, Complex(0.0, 1.0)}}, 0.5));
  fam.push_back(Symbol::angular({{1, 2.0}}, 2.0));
  fam.push_back(Symbol::angular({{-1, Complex(0.6, 0.8)}}, 3.0));
  for (double a : {1.0, 2.0, 4.0}) fam.push_back(Symbol::oscillatory(a));
  return fam;
}

void suite_berger_coburn(Ctx& ctx) {
  const auto& a = suite_catalog()[7].anchors;
  const double t = ctx.cfg.t;
  const std::vector<int> Ns = ctx.integers("N");
  const double fs = ctx.number("forward_s") * t;
  const std::vector<double> rs = ctx.numbers("reverse_s");
  const double stab = ctx.tol("stability");
  std::vector<std::string> header{"symbol", "N", "forward"};
  for (double r : rs) header.push_back("reverse_" + num(r));
  Table tab{"bc_ratios.csv", header, {}};

  const auto fam = bc_family();
  double maxChange = 0.0, maxForward = 0.0, maxReverse = 0.0;
  bool finite = true;
  json changes = json::array();
  for (std::size_t i = 0; i < fam.size(); ++i) {
    std::vector<std::vector<double>> ratios;
    for (int N : Ns) {
      const BasisPtr basis = MultiIndexBasis::make(t, 1, N);
      std::vector<double> row{berger_coburn_forward(fam[i], fs, basis).ratio};
      for (double r : rs) row.push_back(berger_coburn_reverse(fam[i], r * t, basis).ratio);
      std::vector<double> csv{double(i), double(N)};
      csv.insert(csv.end(), row.begin(), row.end());
      tab.rows.push_back(csv);
      ratios.push_back(row);
    }
    double change = 0.0;
    for (std::size_t j = 0; j < ratios[0].size(); ++j) {
      finite = finite && std::isfinite(ratios[0][j]) && std::isfinite(ratios[1][j]);
      change = std::max(change, std::abs(ratios[1][j] - ratios[0][j]) / std::abs(ratios[0][j]));
      (j == 0 ? maxForward : maxReverse) = std::max(j == 0 ? maxForward : maxReverse, ratios[1][j]);
    }
    maxChange = std::max(maxChange, change);
    changes.push_back({{"symbol", fam[i].describe()}, {"relative_change", change}});
  }
  ctx.record("ratios finite over the 18-symbol family", a[0], {{"max_forward", maxForward}, {"max_reverse", maxReverse}},
             0.0, finite);
  ctx.check("ratios change by less than the stability bound from N = " + std::to_string(Ns[0]) + " to " +
                std::to_string(Ns[1]),
            a[1], maxChange, stab, {{"per_symbol", changes}});

  const BasisPtr basis = MultiIndexBasis::make(t, 1, Ns[0]);
  if (t == 1.0) {
    ctx.check("forward ratio of gaussian(1) at s = 0.4: 0.7", a[0],
              std::abs(berger_coburn_forward(Symbol::gaussian(1.0), 0.4, basis).ratio - 0.7), 1e-12);
    ctx.check("reverse ratio of gaussian(1) at s = 1.5: 0.8", a[1],
              std::abs(berger_coburn_reverse(Symbol::gaussian(1.0), 1.5, basis).ratio - 0.8), 1e-12);
  }
  ctx.check("forward ratio of f = 1 is 1", a[0],
            std::abs(berger_coburn_forward(Symbol::constant(1.0), fs, basis).ratio - 1.0), 1e-12);
  ctx.check("reverse ratio of f = 1 is 1", a[1],
            std::abs(berger_coburn_reverse(Symbol::constant(1.0), rs.front() * t, basis).ratio - 1.0), 1e-12);
  ctx.table(std::move(tab));
}

// ---------------------------------------------------------------------------
// dilation

void suite_dilation(Ctx& ctx) {
  const auto& a = suite_catalog()[8].anchors;
  const double t = ctx.cfg.t;
  const int n = ctx.cfg.n;
  const double tol = ctx.tol("tolerance");
  const BasisPtr basis = MultiIndexBasis::make(t, n, ctx.integer("N"));
  const std::vector<std::pair<std::string, Symbol>> fs{
      {"gaussian(1)", Symbol::gaussian(1.0)},
      {"radial polynomial x gaussian", Symbol::poly_gaussian({1.0, -0.5, 0.25}, 1.5)}};
  for (double lambda : ctx.numbers("lambdas")) {
    for (const auto& [name, f] : fs) {
      const OperatorMatrix tf = toeplitz_matrix(f, basis);
      const OperatorMatrix conj = dilation_conjugate(tf, lambda);
      const OperatorMatrix direct = toeplitz_matrix(f.dilate(1.0 / lambda), basis->rescaled(t * lambda * lambda));
      const double e1 = (conj.entries() - direct.entries()).cwiseAbs().maxCoeff();
      ctx.check("conjugated Toeplitz matrix, lambda = " + num(lambda) + ": " + name, a[0], e1, tol);

      const BerezinEvaluator bc(conj), ba(tf);
      double e2 = 0.0;
      for (int i = 0; i < 12; ++i) {
        const Point z = ctx.random_point(n, ctx.number("radius") * std::min(1.0, lambda));
        e2 = std::max(e2, std::abs(bc(lambda * z).value - ba(z).value));
      }
      ctx.check("Berezin transform of the conjugate, lambda = " + num(lambda) + ": " + name, a[1], e2, tol);
    }
  }
  const OperatorMatrix tf = toeplitz_matrix(Symbol::gaussian(1.0), basis);
  ctx.check("lambda = 1 leaves the matrix unchanged", a[0],
            (dilation_conjugate(tf, 1.0).entries() - tf.entries()).cwiseAbs().maxCoeff(), 0.0);
}

// ---------------------------------------------------------------------------
// limits

void suite_limits(Ctx& ctx) {
  const auto& a = suite_catalog()[9].anchors;
  const double tol = ctx.tol("tolerance");
  const std::vector<double> radii{1e2, 1e3, 1e4, 1e5, 1e6};
  const Symbol ang = Symbol::angular({{1, 1.0}}, 1.0);
  const auto thetas = angle_grid(ctx.integer("directions"));

  double angErr = 0.0, bumpErr = 0.0, constErr = 0.0;
  bool allConverged = true, allConstant = true;
  for (double th : thetas) {
    const DirectionApproximant dir = DirectionApproximant::angle(th, radii, tol);
    const LimitVerdict v = limit_symbol(ang, dir, Point::zero(1));
    angErr = std::max(angErr, std::abs(v.value - std::polar(1.0, th + kPi)));
    allConverged = allConverged && v.converged;
    allConstant = allConstant && v.constantInW;
    const LimitVerdict b = limit_symbol(Symbol::gaussian(1.0), dir, Point::zero(1));
    bumpErr = std::max(bumpErr, std::abs(b.value));
    allConverged = allConverged && b.converged;
    const LimitVerdict c = limit_symbol(Symbol::constant(Complex(0.3, -2.0)), dir, Point{Complex(0.5)});
    constErr = std::max(constErr, std::abs(c.value - Complex(0.3, -2.0)) + c.profile.front());
  }
  ctx.check("angular limit symbol along theta equals phi(theta + pi)", a[0], angErr, tol,
            {{"directions", thetas.size()}});
  ctx.record("angular and bump limits converge; angular limits are constant in w", a[0],
             {{"converged", allConverged}, {"constant_in_w", allConstant}}, tol, allConverged && allConstant);
  ctx.check("C0 bump has limit 0 in every direction", a[0], bumpErr, tol);
  ctx.check("constant symbol has its value as limit from the first step", a[0], constErr, 0.0);

  const LimitVerdict osc = limit_symbol(Symbol::sin_sqrt(), DirectionApproximant::angle(0.3, radii, tol), Point::zero(1));
  ctx.record("sin(sqrt(1+|z|)) has no directional limit (reported, not raised)", a[0],
             {{"last_difference", osc.profile.back()}, {"detail", osc.detail}}, tol, !osc.converged);

  // Limit operators.
  const BasisPtr basis = MultiIndexBasis::make(ctx.cfg.t, 1, ctx.integer("operator_N"));
  const double opTol = ctx.tol("operator_tolerance");
  const double th0 = 0.3;
  const DirectionApproximant far = DirectionApproximant::angle(th0, {256.0, 1024.0, 4096.0, 16384.0}, opTol);
  const LimitVerdict lo = limit_operator(ang, far, basis);
  const Complex phi = std::polar(1.0, th0 + kPi);
  const double loErr = lo.limitOperator ? half_block_distance(*lo.limitOperator, phi * OperatorMatrix::identity(basis)) : 1.0;
  ctx.record("limit operator of the angular symbol is phi(theta + pi) Id", a[1],
             {{"profile", lo.profile}, {"converged", lo.converged}, {"distance", loErr}}, opTol,
             lo.converged && loErr <= 1e-12);

  const Complex c0(2.0, 0.5);
  const Symbol bumped = Symbol::constant(c0) + Symbol::gaussian(1.0);
  const DirectionApproximant mid = DirectionApproximant::angle(th0, {16.0, 32.0, 64.0}, 1e-12);
  const LimitVerdict lb = limit_operator(bumped, mid, basis);
  ctx.record("limit operator of c + bump is c Id", a[1], {{"profile", lb.profile}, {"value", cplx(lb.value)}}, 1e-12,
             lb.converged && std::abs(lb.value - c0) <= 1e-12);

  // Shift compatibility: a translate of a VO symbol has the same limit operators.
  const Point z0{Complex(0.7, -0.4)};
  const LimitVerdict ls = limit_operator(ang.translate(z0), far, basis);
  const double shiftErr =
      ls.limitOperator && lo.limitOperator ? half_block_distance(*ls.limitOperator, *lo.limitOperator) : 1.0;
  ctx.check("translating the angular symbol leaves its limit operator unchanged", a[1], shiftErr, opTol,
            {{"converged", ls.converged}});

  // Boundary extension.
  auto phiData = [](double th) { return std::polar(1.0, th); };
  const Symbol e1 = extend_boundary_symbol(phiData, 1.0);
  const Symbol e2 = extend_boundary_symbol(phiData, 2.0);
  double extErr = 0.0;
  for (double th : thetas) {
    const LimitVerdict v = limit_symbol(e1, DirectionApproximant::angle(th, radii, tol), Point::zero(1));
    extErr = std::max(extErr, std::abs(v.value - phiData(th + kPi)));
  }
  ctx.check("extension reproduces the boundary data at the antipode", a[2], extErr, tol);
  ctx.check("extensions with different cutoffs differ by a C0 symbol", a[2], c0_tail(e1 - e2, 6.0).value, 1e-12);
  const Symbol ec = extend_boundary_symbol([](double) { return Complex(0.25, 1.0); }, 1.0);
  ctx.check("constant boundary data gives constant limits", a[2],
            std::abs(limit_symbol(ec, DirectionApproximant::angle(1.1, radii, tol), Point::zero(1)).value -
                     Complex(0.25, 1.0)),
            tol);
  bool rejected = false;
  try {
    (void)extend_boundary_symbol([](double th) { return th < kPi ? Complex(1.0) : Complex(-1.0); }, 1.0);
  } catch (const Error&) {
    rejected = true;
  }
  ctx.record("discontinuous boundary data is rejected", a[2], {{"rejected", rejected}}, 0.0, rejected);
}

// ---------------------------------------------------------------------------
// spectrum

void suite_spectrum(Ctx& ctx) {
  const auto& a = suite_catalog()[10].anchors;
  const Symbol ang = Symbol::angular({{1, 1.0}}, 1.0);
  const auto thetas = angle_grid(ctx.integer("directions"));
  const EssentialSpectrum es = essential_spectrum_vo(ang, thetas);
  double circle = es.ok() ? 0.0 : 1.0;
  Table tab{"essential_spectrum.csv", {"theta", "re", "im"}, {}};
  for (std::size_t i = 0; i < es.samples.size(); ++i) {
    circle = std::max(circle, std::abs(std::abs(es.samples[i]) - 1.0));
    tab.rows.push_back({es.thetas[i], es.samples[i].real(), es.samples[i].imag()});
  }
  ctx.check("essential spectrum samples of e^{i theta} lie on the unit circle", a[0], circle,
            ctx.tol("circle_tolerance"), {{"status", es.status}, {"directions", thetas.size()}});
  ctx.table(std::move(tab));

  const EssentialSpectrum pert = essential_spectrum_vo(ang + Symbol::gaussian(1.0), thetas);
  double pertErr = pert.ok() ? 0.0 : 1.0;
  for (std::size_t i = 0; i < pert.samples.size() && i < es.samples.size(); ++i)
    pertErr = std::max(pertErr, std::abs(pert.samples[i] - es.samples[i]));
  ctx.check("essential spectrum unchanged by a C0 perturbation", a[0], pertErr, ctx.tol("circle_tolerance"));
  const EssentialSpectrum cst = essential_spectrum_vo(Symbol::constant(Complex(0.5, 0.5)), angle_grid(4));
  double cstErr = cst.ok() ? 0.0 : 1.0;
  for (const Complex& v : cst.samples) cstErr = std::max(cstErr, std::abs(v - Complex(0.5, 0.5)));
  ctx.check("essential spectrum of a constant is that constant", a[0], cstErr, 1e-15);
  const EssentialSpectrum rad = essential_spectrum_vo(Symbol::sin_sqrt(), angle_grid(4));
  ctx.record("sin(sqrt(1+|z|)) is flagged as radial VO with non-directional boundary", a[0], {{"status", rad.status}},
             0.0, rad.status == "radial VO with non-directional boundary");

  const BasisPtr basis = MultiIndexBasis::make(ctx.cfg.t, 1, ctx.integer("N"));
  const std::vector<double> radii = ctx.numbers("radii");
  Table ft{"fredholm_tails.csv", {"lambda", "R", "tail"}, {}};
  const double lp = ctx.number("lambda_pass"), lf = ctx.number("lambda_fail");
  const FredholmWitness pass = fredholm_witness(ang, lp, basis, radii);
  for (std::size_t i = 0; i < pass.tails.size(); ++i) ft.rows.push_back({lp, radii[i], pass.tails[i]});
  ctx.record("Fredholm witness passes at lambda = " + num(lp), a[1],
             {{"tails", pass.tails}, {"margin", pass.margin}, {"detail", pass.detail}}, 0.0, pass.passed);
  const FredholmWitness fail = fredholm_witness(ang, lf, basis, radii);
  for (std::size_t i = 0; i < fail.tails.size(); ++i) ft.rows.push_back({lf, radii[i], fail.tails[i]});
  ctx.record("Fredholm witness fails at lambda = " + num(lf) + " (negative control)", a[1],
             {{"tails", fail.tails}, {"margin", fail.margin}, {"detail", fail.detail}}, 0.0, !fail.passed);
  const FredholmWitness zero = fredholm_witness(Symbol::constant(0.0), 1.0, MultiIndexBasis::make(ctx.cfg.t, 1, 32), radii);
  ctx.check("f = 0, lambda = 1: the defect vanishes", a[1],
            zero.tails.empty() ? 1.0 : *std::max_element(zero.tails.begin(), zero.tails.end()), 1e-12);
  ctx.table(std::move(ft));
}

// ---------------------------------------------------------------------------
// compactness

void suite_compactness(Ctx& ctx) {
  const auto& a = suite_catalog()[11].anchors;
  const double t = ctx.cfg.t;
  const std::vector<int> ladder = ctx.integers("ladder");
  const std::vector<double> radii = ctx.numbers("radii");
  CompactnessOptions opts;
  opts.kProbe = ctx.integer("k");
  const double svTol = ctx.tol("sv_tolerance"), tailTol = ctx.tol("tail_tolerance");

  Table sv{"singular_values.csv", {"operator", "k", "sigma"}, {}};
  Table tails{"berezin_tails.csv", {"operator", "R", "tail", "error_bound"}, {}};
  int opIndex = 0;
  auto probe = [&](const std::string& name, const OperatorFactory& f) {
    const CompactnessProfile p = compactness_probe(f, t, 1, ladder, radii, opts);
    for (Eigen::Index k = 0; k < p.singularValues.size(); ++k) sv.rows.push_back({double(opIndex), double(k), p.singularValues(k)});
    for (std::size_t i = 0; i < p.tails.size(); ++i)
      tails.rows.push_back({double(opIndex), radii[i], p.tails[i], p.tailErrorBounds[i]});
    ++opIndex;
    (void)name;
    return p;
  };

  const std::vector<std::pair<std::string, OperatorFactory>> c0{
      {"T_gaussian(1)", [](const BasisPtr& b) { return toeplitz_matrix(Symbol::gaussian(1.0), b); }},
      {"T_gaussian(0.5)", [](const BasisPtr& b) { return toeplitz_matrix(Symbol::gaussian(0.5), b); }},
      {"T_poly_gaussian", [](const BasisPtr& b) { return toeplitz_matrix(Symbol::poly_gaussian({1.0, 0.5}, 0.5), b); }},
  };
  for (const auto& [name, f] : c0) {
    const CompactnessProfile p = probe(name, f);
    const Eigen::Index k = std::min<Eigen::Index>(opts.kProbe, p.singularValues.size() - 1);
    ctx.check("sigma_" + std::to_string(k) + " of " + name, a[0], p.singularValues(k), svTol);
    ctx.check("Berezin tail at R = " + num(radii.back()) + " of " + name, a[0], p.tails.back(), tailTol,
              {{"tails", p.tails}});
    ctx.record("verdict for " + name, a[0], {{"verdict", p.verdict}}, 0.0, p.compact());
  }
  {
    const CompactnessProfile p = probe("rank_one(1,1)", [](const BasisPtr& b) {
      TruncatedVector one(b);
      one.coeffs(0) = 1.0;
      return rank_one(one, one);
    });
    int nonzero = 0;
    for (Eigen::Index k = 0; k < p.singularValues.size(); ++k)
      if (p.singularValues(k) > 1e-14) ++nonzero;
    // The Berezin transform uses the renormalized truncated kernel, so the
    // exact value is exp(-R^2/t) / sum_{k <= N} (R^2/t)^k e^{-R^2/t} / k!.
    const double x = radii.back() * radii.back() / t;
    double mass = 0.0, term = std::exp(-x);
    for (int k = 0; k <= ladder.back(); ++k) {
      mass += term;
      term *= x / (k + 1);
    }
    const double expectedTail = std::exp(-x) / mass;
    const double tailErr = std::abs(p.tails.back() - expectedTail) / expectedTail;
    ctx.record("rank_one(1,1) has one nonzero singular value and tail exp(-R^2/t) (renormalized kernel)", a[0],
               {{"nonzero", nonzero}, {"tail_relative_error", tailErr}, {"verdict", p.verdict}}, 1e-8,
               nonzero == 1 && tailErr <= 1e-8 && p.compact());
  }
  {
    const CompactnessProfile p = probe("K_0.5", [](const BasisPtr& b) { return k_s_matrix(b, 0.5); });
    ctx.record("K_0.5 is compact-consistent", a[0], {{"verdict", p.verdict}}, 0.0, p.compact());
  }
  for (const auto& [name, f] : std::vector<std::pair<std::string, OperatorFactory>>{
           {"Id", [](const BasisPtr& b) { return OperatorMatrix::identity(b); }},
           {"T_constant(2)", [](const BasisPtr& b) { return toeplitz_matrix(Symbol::constant(2.0), b); }}}) {
    const CompactnessProfile p = probe(name, f);
    ctx.record(name + " is not compact-consistent", a[0], {{"verdict", p.verdict}, {"tails", p.tails}}, 0.0,
               !p.compact());
  }

  // Slowly oscillating symbols: three-way equivalence.
  const std::vector<double> slowRadii{4.0, 16.0, 64.0, 256.0};
  for (const auto& [name, f, expected] : std::vector<std::tuple<std::string, Symbol, std::string>>{
           {"gaussian(1)", Symbol::gaussian(1.0), "all-pass"},
           {"constant 1", Symbol::constant(1.0), "all-fail"},
           {"1/(1+log(1+|z|))", Symbol::inv_log(), "all-pass"}}) {
    const SlowOscillationVerdict v = slow_oscillation_equivalence(f, t, slowRadii, ladder, radii);
    ctx.record("slowly oscillating equivalence for " + name, a[1],
               {{"verdict", v.verdict},
                {"symbol_tail", v.symbolTail.values},
                {"heat_tail", v.heatTail.values},
                {"compactness", v.compactness.verdict}},
               0.0, v.verdict == expected);
  }

  // K_s localization, norms and the integral representation.
  const BasisPtr basis = MultiIndexBasis::make(t, 1, 24);
  const double s = 0.5;
  const OperatorMatrix ks = k_s_matrix(basis, s);
  const KernelFn kern = matrix_kernel(ks);
  double loc = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Point z = ctx.random_point(1, 1.5), w = ctx.random_point(1, 1.5);
    loc = std::max(loc, std::abs(kern(w, z)) - std::exp(-s * (z - w).norm2() / (2.0 * t)));
  }
  ctx.check("|<K_s k_z, k_w>| <= exp(-s|z - w|^2/2t)", a[2], loc, 1e-9 * ctx.cfg.toleranceScale);
  const NormEstimate n1 = norm_estimate(ks, NormExponent::One, {ctx.cfg.seed, 4, 8});
  const NormEstimate ninf = norm_estimate(ks, NormExponent::Infinity, {ctx.cfg.seed, 4, 8});
  ctx.record("K_s norm brackets: lower <= upper, lower <= s^{-2} (p = 1), lower <= 1 (p = inf)", a[2],
             {{"p1", {n1.lower, n1.upper}}, {"pinf", {ninf.lower, ninf.upper}}}, 1e-6,
             n1.lower <= n1.upper && ninf.lower <= ninf.upper && n1.lower <= 1.0 / (s * s) + 1e-6 &&
                 ninf.lower <= 1.0 + 1e-6);
  TruncatedVector v(basis);
  for (Eigen::Index i = 0; i < basis->dim(); ++i) v.coeffs(i) = ctx.random_point(1, 1.0)[0] / double(1 + i);
  const IntegralApplyResult ia = integral_apply(kern, v);
  ctx.check("integral representation reproduces K_s v", a[2], (ia.vector.coeffs - ks.apply(v).coeffs).norm(),
            1e-10 * ctx.cfg.toleranceScale, {{"beta", ia.fit.beta}, {"C", ia.fit.C}});
  ctx.table(std::move(sv));
  ctx.table(std::move(tails));
}

// ---------------------------------------------------------------------------
// esscen

void suite_esscen(Ctx& ctx) {
  const auto& a = suite_catalog()[12].anchors;
  const double t = ctx.cfg.t;
  const std::vector<int> ladder = ctx.integers("ladder");
  const std::vector<double> radii = ctx.numbers("radii");
  Table tab{"commutator_tails.csv", {"pair", "R", "tail"}, {}};

  const CommutatorProfile pos =
      commutator_probe(Symbol::sin_sqrt(), Symbol::angular({{1, 1.0}}, 1.0), t, ladder, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) tab.rows.push_back({0.0, radii[i], pos.probe.tails[i]});
  ctx.record("[T_f, T_g] compact-consistent for f = sin(sqrt(1+|z|)) (VO), g = e^{i theta} (BUC)", a[0],
             {{"tails", pos.probe.tails}, {"verdict", pos.probe.verdict}, {"f_vo", pos.fIsVO}, {"g_buc", pos.gIsBUC}},
             0.0, pos.probe.compact());

  const CommutatorProfile neg = commutator_probe(Symbol::smooth_sign(Point{1.0}, 1.0),
                                                 Symbol::plane_wave(Point{Complex(0.0, 1.0)}), t, ladder, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) tab.rows.push_back({1.0, radii[i], neg.probe.tails[i]});
  ctx.record("negative control: f = tanh(Re z) (not VO), g = e^{i Im z}: tail stalls", a[0],
             {{"tails", neg.probe.tails}, {"verdict", neg.probe.verdict}, {"f_vo", neg.fIsVO}}, 0.0,
             !neg.probe.compact());

  const CommutatorProfile cst =
      commutator_probe(Symbol::constant(2.0), Symbol::angular({{1, 1.0}}, 1.0), t, ladder, radii);
  ctx.check("constant f commutes with every T_g", a[0], cst.maxEntry, 0.0);
  ctx.table(std::move(tab));
}

using SuiteFn = void (*)(Ctx&);

const std::map<std::string, SuiteFn>& suite_functions() {
  static const std::map<std::string, SuiteFn> fns{
      {"basis-norms", suite_basis_norms},   {"kernels-weyl", suite_kernels_weyl},
      {"toeplitz-assembly", suite_toeplitz}, {"heat", suite_heat},
      {"correspondence", suite_correspondence}, {"wiener", suite_wiener},
      {"trace-identity", suite_trace},      {"berger-coburn", suite_berger_coburn},
      {"dilation", suite_dilation},         {"limits", suite_limits},
      {"spectrum", suite_spectrum},         {"compactness", suite_compactness},
      {"esscen", suite_esscen},
  };
  return fns;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunOutcome run(const Config& config, int jobs) {
  const std::vector<std::string> names = selected_suites(config.suite);
  std::vector<SuiteResult> results(names.size());
  std::vector<std::string> errors(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < names.size(); i = next++) {
      SuiteResult& r = results[i];
      r.suite = names[i];
      const auto start = Clock::now();
      try {
        Ctx ctx(config, names[i], r);
        suite_functions().at(names[i])(ctx);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(names.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  RunOutcome out;
  json suites = json::array();
  json timing = json::object();
  int total = 0, passed = 0;
  bool internal = false;
  for (std::size_t i = 0; i < names.size(); ++i) {
    SuiteResult& r = results[i];
    if (!errors[i].empty()) {
      internal = true;
      r.checks.push_back(json{{"name", "suite raised an error"},
                              {"anchor", ""},
                              {"values", {{"error", errors[i]}}},
                              {"tolerance", 0.0},
                              {"passed", false}});
    }
    for (const json& c : r.checks) {
      ++total;
      if (c.at("passed").get<bool>()) ++passed;
    }
    suites.push_back(json{{"name", r.suite}, {"passed", r.passed()}, {"checks", r.checks}});
    timing[r.suite] = r.seconds;
  }
  out.allPassed = total == passed && !internal;
  out.report = json{{"schema", "focklab-report/1"},
                    {"generated_at", utc_timestamp()},
                    {"config", config_to_json(config)},
                    {"suites", suites},
                    {"summary",
                     {{"checks", total},
                      {"passed", passed},
                      {"failed", total - passed},
                      {"internal_error", internal},
                      {"status", out.allPassed ? "pass" : "fail"}}}};
  double sum = 0.0;
  for (const SuiteResult& r : results) sum += r.seconds;
  out.timings = json{{"suites", timing}, {"total_seconds", sum}, {"jobs", threads}};
  out.suites = std::move(results);
  return out;
}

void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "report.json");
    f << outcome.report.dump(2) << '\n';
  }
  {
    std::ofstream f(dir / "timings.json");
    f << outcome.timings.dump(2) << '\n';
  }
  for (const SuiteResult& r : outcome.suites) {
    for (const Table& t : r.tables) {
      std::ofstream f(dir / t.file);
      for (std::size_t i = 0; i < t.header.size(); ++i) f << (i ? "," : "") << t.header[i];
      f << '\n';
      char buf[40];
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%.17e", row[i]);
          f << (i ? "," : "") << buf;
        }
        f << '\n';
      }
    }
  }
}

json strip_timestamp(json report) {
  report.erase("generated_at");
  return report;
}

}  // namespace focklab::cli
