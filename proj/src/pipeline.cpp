#include "cantorlab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <sstream>

#include <boost/version.hpp>
#include <gmp.h>
#include <mpfr.h>

namespace cantorlab {

namespace fs = std::filesystem;
namespace mp = boost::multiprecision;

namespace {

constexpr const char* kVersion = "0.1.0";

LabError field_error(const std::string& field, const std::string& what) { return invalid(field + ": " + what); }

std::string scalar_text(const Json& v, const std::string& field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return v.dump();
  throw field_error(field, "expected a number or a numeric string");
}

Rational rational_field(const Json& v, const std::string& field) {
  try {
    return parse_rational(scalar_text(v, field));
  } catch (const LabError& e) {
    throw field_error(field, e.what());
  }
}

Real real_field(const Json& v, const std::string& field) {
  try {
    return parse_real(scalar_text(v, field));
  } catch (const LabError& e) {
    throw field_error(field, e.what());
  }
}

int int_field(const Json& doc, const char* key, int fallback, int lo, int hi) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_number_integer()) throw field_error(key, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) throw field_error(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::vector<int> int_list(const Json& v, const std::string& field, int lo, int hi) {
  if (!v.is_array()) throw field_error(field, "expected an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<long long>() < lo || e.get<long long>() > hi)
      throw field_error(field, "entries must be integers in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out.push_back(static_cast<int>(e.get<long long>()));
  }
  return out;
}

std::vector<Real> real_list(const Json& v, const std::string& field) {
  if (!v.is_array()) throw field_error(field, "expected an array");
  std::vector<Real> out;
  for (size_t i = 0; i < v.size(); ++i) out.push_back(real_field(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Rational> rational_list(const Json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw field_error(field, "expected a nonempty array");
  std::vector<Rational> out;
  for (size_t i = 0; i < v.size(); ++i) out.push_back(rational_field(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

GammaSpec parse_gamma(const Json& v) {
  if (v.is_string() || v.is_number()) return GammaSpec::constant(rational_field(v, "gamma"));
  if (v.is_array()) return GammaSpec::explicit_list(rational_list(v, "gamma"));
  if (!v.is_object()) throw field_error("gamma", "expected a number, list or object");
  if (v.contains("constant")) return GammaSpec::constant(rational_field(v.at("constant"), "gamma.constant"));
  if (v.contains("periodic")) return GammaSpec::periodic(rational_list(v.at("periodic"), "gamma.periodic"));
  if (v.contains("list")) return GammaSpec::explicit_list(rational_list(v.at("list"), "gamma.list"));
  if (v.contains("family")) {
    const std::string f = v.at("family").is_string() ? v.at("family").get<std::string>() : "";
    GammaFamily family;
    if (f == "power") {
      family = GammaFamily::kPower;
    } else if (f == "reciprocal") {
      family = GammaFamily::kReciprocal;
    } else if (f == "double_exponential") {
      family = GammaFamily::kDoubleExponential;
    } else {
      throw field_error("gamma.family", "unknown family '" + f + "'");
    }
    if (!v.contains("a") || !v.contains("b")) throw field_error("gamma", "family needs a and b");
    try {
      return GammaSpec::formula(family, rational_field(v.at("a"), "gamma.a"), rational_field(v.at("b"), "gamma.b"));
    } catch (const LabError& e) {
      throw field_error("gamma", e.what());
    }
  }
  throw field_error("gamma", "object needs one of constant, periodic, list, family");
}

const std::map<std::string, std::vector<std::string>>& dependencies() {
  static const std::map<std::string, std::vector<std::string>> deps{
      {"spacing", {"jacobi"}}, {"widom2", {"jacobi"}}, {"ap", {"jacobi"}}, {"widom", {"chebyshev"}}};
  return deps;
}

std::string relative_difference(const Real& a, const Real& b) {
  const Real scale = mp::max(mp::abs(a), mp::abs(b));
  return dec(scale == 0 ? Real(0) : Real(mp::abs(a - b) / scale));
}

std::vector<double> to_doubles(const std::vector<Real>& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.convert_to<double>());
  return out;
}

}  // namespace

const std::vector<std::string>& known_products() {
  static const std::vector<std::string> products{"levelset", "capacity", "green",   "modulus", "cdf",
                                                 "pw",       "jacobi",   "spacing", "widom2",  "chebyshev",
                                                 "widom",    "markov",   "ap",      "hset"};
  return products;
}

std::set<std::string> resolve_products(const std::set<std::string>& requested) {
  std::set<std::string> out;
  std::vector<std::string> todo(requested.begin(), requested.end());
  while (!todo.empty()) {
    std::string p = todo.back();
    todo.pop_back();
    if (!out.insert(p).second) continue;
    auto it = dependencies().find(p);
    if (it != dependencies().end()) todo.insert(todo.end(), it->second.begin(), it->second.end());
  }
  return out;
}

ExperimentConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw invalid("config: expected a JSON object");
  ExperimentConfig c;
  c.raw = doc;
  if (doc.contains("variant")) {
    if (!doc.at("variant").is_string()) throw field_error("variant", "expected a string");
    try {
      c.variant = parse_variant(doc.at("variant").get<std::string>());
    } catch (const LabError& e) {
      throw field_error("variant", e.what());
    }
  }
  if (doc.contains("gamma")) c.gamma = parse_gamma(doc.at("gamma"));
  c.levels = int_field(doc, "levels", c.variant == TowerVariant::kInterval ? 0 : 4, 0, 64);
  c.n = int_field(doc, "N", c.n, 1, 4096);
  if (doc.contains("m")) c.m = int_field(doc, "m", 0, 1, 1 << 20);
  c.precision = static_cast<unsigned>(int_field(doc, "precision", 256, 64, 1 << 16));
  if (doc.contains("precision")) c.precision_source = "config";

  if (doc.contains("products")) {
    const Json& p = doc.at("products");
    if (!p.is_array()) throw field_error("products", "expected an array of names");
    for (const auto& e : p) {
      const std::string name = e.is_string() ? e.get<std::string>() : e.dump();
      if (std::find(known_products().begin(), known_products().end(), name) == known_products().end())
        throw field_error("products", "unknown product '" + name + "'");
      c.products.insert(name);
    }
  }
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw field_error("output", "expected a path string");
    c.output = doc.at("output").get<std::string>();
  }
  if (doc.contains("tolerances")) {
    const Json& t = doc.at("tolerances");
    if (!t.is_object()) throw field_error("tolerances", "expected an object");
    if (t.contains("green")) c.green_tol = real_field(t.at("green"), "tolerances.green");
    if (t.contains("cross_level")) c.cross_level_tol = real_field(t.at("cross_level"), "tolerances.cross_level");
  }
  if (doc.contains("c")) {
    c.c = rational_field(doc.at("c"), "c");
    if (*c.c <= 0) throw field_error("c", "must be positive");
  }
  if (doc.contains("green_points")) {
    const Json& g = doc.at("green_points");
    if (!g.is_array()) throw field_error("green_points", "expected an array");
    for (size_t i = 0; i < g.size(); ++i) {
      const std::string f = "green_points[" + std::to_string(i) + "]";
      if (g[i].is_array()) {
        if (g[i].size() != 2) throw field_error(f, "expected [re, im]");
        c.green_points.push_back(real_field(g[i][0], f));
        c.green_points.push_back(real_field(g[i][1], f));
      } else {
        c.green_points.push_back(real_field(g[i], f));
        c.green_points.push_back(Real(0));
      }
    }
  }
  if (doc.contains("cdf_points")) c.cdf_points = real_list(doc.at("cdf_points"), "cdf_points");
  if (doc.contains("modulus")) {
    const Json& m = doc.at("modulus");
    if (m.contains("deltas")) c.modulus_deltas = real_list(m.at("deltas"), "modulus.deltas");
    c.modulus_samples = int_field(m, "samples", c.modulus_samples, 1, 1 << 16);
  }
  if (doc.contains("chebyshev")) {
    const Json& m = doc.at("chebyshev");
    if (m.contains("degrees")) c.chebyshev_degrees = int_list(m.at("degrees"), "chebyshev.degrees", 1, 64);
    c.chebyshev_density = int_field(m, "grid_density", c.chebyshev_density, 2, 1 << 14);
  }
  if (doc.contains("markov")) {
    const Json& m = doc.at("markov");
    if (m.contains("degrees")) c.markov_degrees = int_list(m.at("degrees"), "markov.degrees", 1, 64);
    c.markov_density = int_field(m, "grid_density", c.markov_density, 2, 1 << 14);
  }
  if (doc.contains("ap")) {
    const Json& m = doc.at("ap");
    c.ap_k_max = int_field(m, "k_max", c.ap_k_max, 1, 1 << 16);
    if (m.contains("eps")) c.ap_eps = real_list(m.at("eps"), "ap.eps");
  }

  if (c.variant == TowerVariant::kKGamma || c.variant == TowerVariant::kK1Gamma) {
    for (int k = 1; k <= std::max(c.levels, 1); ++k) {
      const Rational g = c.gamma.gamma(k);
      if (g <= 0 || g >= Rational(1, 4))
        throw invalid("gamma[" + std::to_string(k) + "] out of (0, 1/4): " + to_string(g));
    }
  }
  if (c.variant == TowerVariant::kCustom) {
    if (!doc.contains("stages") || !doc.at("stages").is_array() || doc.at("stages").empty())
      throw field_error("stages", "custom variant needs a nonempty array of coefficient lists");
  }
  if (c.products.count("hset") &&
      (c.variant != TowerVariant::kKGamma || c.gamma.supremum() >= Rational(1, 32)))
    throw field_error("products.hset", "h-comparison requires the gamma_k < 1/32 parameter regime");
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw invalid(std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

void apply_environment(ExperimentConfig& config) {
  const char* env = std::getenv("LAB_PRECISION_BITS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long bits = std::strtol(env, &end, 10);
  if (*end != '\0' || bits < 64 || bits > (1 << 16)) throw invalid("LAB_PRECISION_BITS: expected an integer in [64, 65536]");
  config.precision = static_cast<unsigned>(bits);
  config.precision_source = "LAB_PRECISION_BITS";
}

// ---------------------------------------------------------------------------

namespace {

class Run {
 public:
  Run(const ExperimentConfig& c, const RunOptions& o) : cfg_(c), opt_(o) {}

  RunResult execute();

 private:
  void log(const std::string& msg) const {
    if (opt_.verbose && opt_.log) opt_.log(msg);
  }
  bool wanted(const std::string& p) const { return cfg_.products.count(p) > 0; }
  bool enabled(const std::string& p) const { return all_.count(p) > 0; }
  void emit(const std::string& product, const std::string& name, const std::string& body);
  template <class F>
  void stage(const std::string& name, F&& body);
  void write_manifest();

  const PotentialContext& ctx() {
    if (!ctx_) ctx_ = std::make_unique<PotentialContext>(make_potential_context(tower_));
    return *ctx_;
  }
  const JacobiData& jacobi();
  IntervalUnion level() const {
    if (tower_->s_max == 0) {
      IntervalUnion k;
      k.intervals = {{Real(-1), Real(1)}};
      k.branches = {1};
      k.precision = cfg_.precision;
      return k;
    }
    return level_set(*tower_, s_);
  }

  void do_levelset();
  void do_capacity();
  void do_green();
  void do_modulus();
  void do_cdf();
  void do_pw();
  void do_spacing();
  void do_widom2();
  void do_chebyshev();
  void do_widom();
  void do_markov();
  void do_ap();
  void do_hset();

  const ExperimentConfig& cfg_;
  const RunOptions& opt_;
  std::set<std::string> all_;
  fs::path dir_;
  std::shared_ptr<const GammaTower> tower_;
  std::unique_ptr<PotentialContext> ctx_;
  std::optional<JacobiData> jacobi_;
  std::vector<ExtremalReport> cheb_;
  int s_ = 0;
  Json stages_ = Json::array();
  Json files_ = Json::array();
  std::vector<std::string> names_;
  RunResult result_;
  std::string status_ = "ok";
  std::string failed_stage_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void Run::emit(const std::string& product, const std::string& name, const std::string& body) {
  write_file(dir_ / name, body);
  files_.push_back(Json{{"name", name}, {"product", product}, {"sha256", sha256_hex(body)}, {"bytes", body.size()}});
  names_.push_back(name);
  log("wrote " + name);
}

template <class F>
void Run::stage(const std::string& name, F&& body) {
  if (result_.exit_code != 0) return;
  const auto t0 = std::chrono::steady_clock::now();
  std::string status = "ok";
  try {
    log("stage " + name);
    body();
  } catch (const LabError& e) {
    status = "failed";
    result_.message = name + ": " + e.what();
    result_.exit_code = e.kind() == ErrorKind::kNumerical ? 3 : (e.kind() == ErrorKind::kInvalidArgument ? 2 : 1);
  } catch (const std::exception& e) {
    status = "failed";
    result_.message = name + ": " + e.what();
    result_.exit_code = 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  stages_.push_back(Json{{"name", name}, {"seconds", secs}, {"status", status}});
  if (status != "ok") {
    status_ = "partial";
    failed_stage_ = name;
  }
}

const JacobiData& Run::jacobi() {
  if (!jacobi_) {
    const int m = cfg_.m ? *cfg_.m : default_quadrature_size(cfg_.n, *tower_, s_);
    DiscreteMeasure mu = pullback_quadrature(*tower_, s_, m);
    const int n = std::min<int>(cfg_.n, static_cast<int>(mu.size()));
    if (n < cfg_.n) log("N reduced to the node count " + std::to_string(n));
    jacobi_ = stieltjes(mu, n);
  }
  return *jacobi_;
}

void Run::do_levelset() {
  Json j;
  j["tower"] = to_json(*tower_);
  j["level"] = s_;
  j["set"] = to_json(level());
  emit("levelset", "levelset.json", j.dump(2) + "\n");
}

void Run::do_capacity() {
  Csv csv({"s", "capacity", "product_form", "relative_difference"});
  for (int s = 0; s <= s_; ++s) {
    const Real cap = capacity(ctx(), s);
    if (tower_->has_gamma()) {
      const Real prod = capacity_product_form(*tower_, s);
      csv.row({std::to_string(s), dec(cap), dec(prod), relative_difference(cap, prod)});
    } else {
      csv.row({std::to_string(s), dec(cap), "", ""});
    }
  }
  csv.row({"limit", dec(capacity_limit(ctx())), "", ""});
  emit("capacity", "capacity.csv", csv.str());
}

void Run::do_green() {
  std::vector<Complex> points;
  if (cfg_.green_points.empty()) {
    IntervalUnion k = level();
    const Real lo = k.intervals.front().first, hi = k.intervals.back().second;
    const Real w = hi - lo;
    for (int i = 0; i < 100; ++i) points.push_back(Complex{lo - w / 2 + 2 * w * i / 99, Real(0)});
  } else {
    for (size_t i = 0; i + 1 < cfg_.green_points.size(); i += 2)
      points.push_back(Complex{cfg_.green_points[i], cfg_.green_points[i + 1]});
  }
  Csv csv({"re", "im", "level", "value", "converged"});
  for (const auto& z : points) {
    GreenSample g = green(ctx(), z, cfg_.green_tol);
    csv.row({dec(z.re), dec(z.im), std::to_string(g.level), dec(g.value), g.converged ? "1" : "0"});
  }
  emit("green", "green.csv", csv.str());
}

void Run::do_modulus() {
  ModulusOptions o;
  o.deltas = cfg_.modulus_deltas;
  if (o.deltas.empty())
    for (int k = 2; k <= 12; k += 2) o.deltas.push_back(pow2(-k));
  o.samples_per_delta = cfg_.modulus_samples;
  o.tol = cfg_.green_tol;
  ModulusReport r = green_modulus(ctx(), o);
  emit("modulus", "modulus.csv", modulus_csv(r).str());
  emit("modulus", "modulus.json", to_json(r).dump(2) + "\n");
  SvgPlot plot{"Green modulus of continuity", "delta", "omega", true, true, {}};
  std::vector<double> d, lo, hi;
  for (const auto& row : r.rows) {
    if (row.skipped) continue;
    d.push_back(row.delta.convert_to<double>());
    lo.push_back(row.omega_min.convert_to<double>());
    hi.push_back(row.omega_max.convert_to<double>());
  }
  plot.series = {{"omega_max", d, hi, false}, {"omega_min", d, lo, false}};
  emit("modulus", "modulus.svg", plot.render());
}

void Run::do_cdf() {
  std::vector<Real> points = cfg_.cdf_points;
  if (points.empty()) {
    std::vector<Real> mids;
    for (int j = 1; j <= std::min(s_, 8); ++j) {
      IntervalUnion k = level_set(*tower_, j);
      for (size_t i = 0; i + 1 < k.size(); ++i) mids.push_back((k.intervals[i].second + k.intervals[i + 1].first) / 2);
    }
    std::sort(mids.begin(), mids.end());
    mids.erase(std::unique(mids.begin(), mids.end()), mids.end());
    const size_t want = 20;
    if (mids.size() <= want) {
      points = mids;
    } else {
      for (size_t i = 0; i < want; ++i) points.push_back(mids[i * (mids.size() - 1) / (want - 1)]);
    }
  }
  const int m = cfg_.m ? *cfg_.m : 2;
  DiscreteMeasure mu = pullback_quadrature(*tower_, s_, m);
  Csv csv({"c", "mass", "value", "level", "quadrature", "difference"});
  for (const auto& c : points) {
    CdfValue v = equilibrium_cdf(ctx(), c);
    const Real q = quadrature_cdf(mu, c);
    csv.row({dec(c), dec(v.mass), dec(v.value), std::to_string(v.level), dec(q), dec(Real(mp::abs(q - v.value)))});
  }
  emit("cdf", "cdf.csv", csv.str());
}

void Run::do_pw() { emit("pw", "pw.csv", pw_csv(pw_sum(ctx(), s_)).str()); }

void Run::do_spacing() {
  const JacobiData& j = jacobi();
  auto zs = zeros_up_to(j, j.trusted_n);
  Json reports = Json::array();
  bool all_ok = true;
  for (int n = 2; n <= j.trusted_n; ++n) {
    SpacingReport r = zero_spacing(zs[static_cast<size_t>(n - 1)], n, tower_->delta, cfg_.c);
    all_ok = all_ok && r.ok;
    reports.push_back(to_json(r));
  }
  Json doc;
  doc["level"] = s_;
  doc["c"] = cfg_.c ? Json(to_string(*cfg_.c)) : Json(nullptr);
  doc["trusted_n"] = j.trusted_n;
  doc["all_ok"] = all_ok;
  doc["reports"] = reports;
  emit("spacing", "spacing.json", doc.dump(2) + "\n");
}

void Run::do_widom2() {
  WidomHilbertSeries w = widom_hilbert(jacobi(), capacity(ctx(), s_));
  emit("widom2", "widom2.csv", widom2_csv(w).str());
  std::vector<double> n;
  for (size_t i = 0; i < w.w2.size(); ++i) n.push_back(static_cast<double>(i + 1));
  SvgPlot plot{"Widom-Hilbert factors", "n", "W2_n", false, false, {{"W2_n", n, to_doubles(w.w2), true}}};
  emit("widom2", "widom2.svg", plot.render());
}

void Run::do_chebyshev() {
  std::vector<int> degrees = cfg_.chebyshev_degrees;
  const long dyadic = tower_->s_max == 0 ? 1 : tower_->branch_count(s_);
  if (degrees.empty()) {
    for (int n = 1; n <= std::min<long>(dyadic, 8); ++n) degrees.push_back(n);
    if (dyadic > 8 && dyadic <= 64) degrees.push_back(static_cast<int>(dyadic));
  }
  IntervalUnion k = level();
  Json reports = Json::array();
  cheb_.clear();
  for (int n : degrees) {
    cheb_.push_back(remez(k, n, cfg_.chebyshev_density));
    reports.push_back(to_json(cheb_.back()));
  }
  Json doc;
  doc["level"] = s_;
  doc["set"] = to_json(k);
  doc["reports"] = reports;
  if (s_ > 0 && dyadic <= 64) {
    for (const auto& r : cheb_) {
      if (r.degree != dyadic) continue;
      const Real norm = dyadic_chebyshev_norm(*tower_, s_);
      doc["closed_form"] = Json{{"degree", dyadic}, {"norm", dec(norm)}, {"relative_error", relative_difference(r.norm, norm)}};
    }
  }
  emit("chebyshev", "chebyshev.json", doc.dump(2) + "\n");
}

void Run::do_widom() {
  WidomSeries w = widom_series(cheb_, capacity(ctx(), s_));
  emit("widom", "widom.csv", widom_csv(w).str());
  std::vector<double> n, v;
  for (const auto& r : w.rows) {
    n.push_back(r.n);
    v.push_back(r.w.convert_to<double>());
  }
  SvgPlot plot{"Widom factors", "n", "W_n", false, false, {{"W_n", n, v, true}}};
  emit("widom", "widom.svg", plot.render());
}

void Run::do_markov() {
  std::vector<int> degrees = cfg_.markov_degrees;
  if (degrees.empty()) {
    degrees = {1, 2};
    for (int j = 2; j <= std::min(s_, 4); ++j) degrees.push_back(1 << j);
  }
  IntervalUnion k = level();
  std::vector<MarkovReport> rows;
  for (int n : degrees) {
    MarkovOptions o;
    o.grid_density = cfg_.markov_density;
    if (tower_->has_gamma()) {
      o.tower = tower_.get();
      o.level = s_;
    }
    rows.push_back(markov_factor(k, n, o));
  }
  emit("markov", "markov.csv", markov_csv(rows).str());
}

void Run::do_ap() {
  const JacobiData& j = jacobi();
  const size_t len = static_cast<size_t>(j.trusted_n);
  if (len < 2) throw numerical("ap: fewer than two trusted coefficients");
  std::vector<Real> a(j.a.begin(), j.a.begin() + static_cast<long>(std::min(len, j.a.size())));
  std::vector<Real> b(j.b.begin(), j.b.begin() + static_cast<long>(len));
  const int k_max = std::min<int>(cfg_.ap_k_max, static_cast<int>(std::min(a.size(), b.size())) - 1);
  APReport ra = ap_profile(a, k_max, cfg_.ap_eps);
  APReport rb = ap_profile(b, k_max, cfg_.ap_eps);
  Csv prof({"k", "D_a", "D_b", "D_a_first_half", "D_a_second_half"});
  for (int k = 0; k <= k_max; ++k) {
    const size_t i = static_cast<size_t>(k);
    prof.row({std::to_string(k), dec(ra.d[i]), dec(rb.d[i]), i < ra.first_half.size() ? dec(ra.first_half[i]) : "",
              i < ra.second_half.size() ? dec(ra.second_half[i]) : ""});
  }
  emit("ap", "ap.csv", prof.str());
  Csv dy({"j", "shift", "D_a", "D_b"});
  for (size_t i = 0; i < ra.dyadic.size(); ++i)
    dy.row({std::to_string(ra.dyadic[i].j), std::to_string(ra.dyadic[i].shift), dec(ra.dyadic[i].d), dec(rb.dyadic[i].d)});
  emit("ap", "ap_dyadic.csv", dy.str());
  std::vector<int> shifts;
  for (int jj = 0; jj <= 6 && 4 * (1 << jj) <= static_cast<int>(a.size()); ++jj) shifts.push_back(1 << jj);
  Csv tail({"row", "sequence", "k", "n0", "sup"});
  int row = 0;
  for (const auto& [name, seq] : {std::pair<std::string, const std::vector<Real>*>{"a", &a}, {"b", &b}}) {
    TailReport t = asymptotic_ap_gap(*seq, shifts);
    for (const auto& c : t.curves)
      for (size_t i = 0; i < c.n0.size(); ++i)
        tail.row({std::to_string(row++), name, std::to_string(c.k), std::to_string(c.n0[i]), dec(c.sup[i])});
  }
  emit("ap", "ap_tail.csv", tail.str());
  std::vector<double> x, ya, yb;
  for (size_t i = 0; i < ra.dyadic.size(); ++i) {
    x.push_back(ra.dyadic[i].j);
    ya.push_back(ra.dyadic[i].d.convert_to<double>());
    yb.push_back(rb.dyadic[i].d.convert_to<double>());
  }
  SvgPlot plot{"Dyadic shift trace D(2^j)", "j", "D", false, false, {{"a_n", x, ya, false}, {"b_n", x, yb, false}}};
  emit("ap", "ap.svg", plot.render());
  if (!ra.dyadic_nonincreasing) log("finding: dyadic trace of a_n is not nonincreasing");
}

void Run::do_hset() {
  HReport r = h_compare(*tower_, s_);
  emit("hset", "hset.csv", hset_csv(r).str());
  std::vector<double> s, lo, hi;
  for (const auto& l : r.levels) {
    s.push_back(l.s);
    lo.push_back(l.ratio_min.convert_to<double>());
    hi.push_back(l.ratio_max.convert_to<double>());
  }
  SvgPlot plot{"candidate-h mass ratios", "s", "mass / h(length)", false, false,
               {{"ratio_min", s, lo, false}, {"ratio_max", s, hi, false}}};
  emit("hset", "hset.svg", plot.render());
}

void Run::write_manifest() {
  Json m;
  m["tool"] = "lab";
  m["version"] = kVersion;
  m["status"] = status_;
  m["exit_code"] = result_.exit_code;
  if (!result_.message.empty()) m["message"] = result_.message;
  if (!failed_stage_.empty()) m["failed_stage"] = failed_stage_;
  m["inputs"] = cfg_.raw;
  Json resolved;
  resolved["gamma"] = cfg_.gamma.describe();
  resolved["variant"] = to_string(cfg_.variant);
  resolved["levels"] = s_;
  resolved["N"] = cfg_.n;
  resolved["m"] = cfg_.m ? Json(*cfg_.m) : Json("default");
  resolved["precision"] = cfg_.precision;
  resolved["precision_source"] = cfg_.precision_source;
  m["resolved"] = resolved;
  Json requested = Json::array(), implied = Json::array();
  for (const auto& p : known_products()) {
    if (wanted(p)) requested.push_back(p);
    else if (enabled(p)) implied.push_back(p);
  }
  m["products"] = Json{{"requested", requested}, {"implied", implied}};
  m["versions"] = Json{{"cantorlab", kVersion},
                       {"boost", BOOST_LIB_VERSION},
                       {"mpfr", mpfr_get_version()},
                       {"gmp", gmp_version}};
  m["workers"] = opt_.workers;
  m["stages"] = stages_;
  m["files"] = files_;
  m["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  write_file(dir_ / "manifest.json", m.dump(2) + "\n");
  names_.push_back("manifest.json");
}

RunResult Run::execute() {
  dir_ = opt_.output ? fs::path(*opt_.output) : fs::path(cfg_.output);
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    result_.exit_code = 2;
    result_.message = "output: cannot create directory " + dir_.string();
    return result_;
  }
  result_.directory = dir_;
  all_ = resolve_products(cfg_.products);
  PrecisionGuard guard(cfg_.precision);
  stage("tower", [&] {
    if (cfg_.variant == TowerVariant::kInterval) {
      tower_ = std::make_shared<const GammaTower>(interval_tower(cfg_.precision));
    } else if (cfg_.variant == TowerVariant::kCustom) {
      std::vector<std::vector<Rational>> stages;
      const Json& st = cfg_.raw.at("stages");
      for (size_t i = 0; i < st.size(); ++i) stages.push_back(rational_list(st[i], "stages[" + std::to_string(i) + "]"));
      tower_ = std::make_shared<const GammaTower>(build_custom_tower(stages, cfg_.precision));
    } else {
      tower_ = std::make_shared<const GammaTower>(build_tower(cfg_.gamma, cfg_.variant, cfg_.levels, cfg_.precision));
    }
    s_ = std::min(cfg_.levels, tower_->s_max);
  });
  const std::vector<std::pair<std::string, void (Run::*)()>> order{
      {"levelset", &Run::do_levelset}, {"capacity", &Run::do_capacity}, {"green", &Run::do_green},
      {"modulus", &Run::do_modulus},   {"cdf", &Run::do_cdf},           {"pw", &Run::do_pw},
      {"jacobi", nullptr},             {"spacing", &Run::do_spacing},   {"widom2", &Run::do_widom2},
      {"chebyshev", &Run::do_chebyshev}, {"widom", &Run::do_widom},     {"markov", &Run::do_markov},
      {"ap", &Run::do_ap},             {"hset", &Run::do_hset}};
  for (const auto& [name, fn] : order) {
    if (!enabled(name)) continue;
    if (name == "jacobi") {
      stage("jacobi", [&] {
        const JacobiData& j = jacobi();
        if (wanted("jacobi")) emit("jacobi", "jacobi.csv", jacobi_csv(j).str());
      });
    } else if (wanted(name) || name == "chebyshev") {
      stage(name, [&, fn = fn] { (this->*fn)(); });
    }
  }
  write_manifest();
  result_.files = names_;
  if (result_.exit_code == 0) result_.message = "ok";
  return result_;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  Run run(config, options);
  return run.execute();
}

// ---------------------------------------------------------------------------

std::string CompareReport::str() const {
  std::ostringstream os;
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  os << "key,column,rows,max_abs,max_rel\n";
  for (const auto& c : columns)
    os << c.key << "," << c.column << "," << c.rows << "," << to_decimal(c.max_abs, 6) << "," << to_decimal(c.max_rel, 6) << "\n";
  return os.str();
}

CompareReport compare_runs(const fs::path& manifest_a, const fs::path& manifest_b, const std::vector<std::string>& keys,
                           int max_rows) {
  auto load = [](const fs::path& p) {
    try {
      return Json::parse(read_file(p));
    } catch (const Json::exception& e) {
      throw invalid("manifest " + p.string() + ": " + e.what());
    }
  };
  const Json ma = load(manifest_a), mb = load(manifest_b);
  auto files_of = [](const Json& m) {
    std::set<std::string> out;
    if (m.contains("files"))
      for (const auto& f : m.at("files")) out.insert(f.at("name").get<std::string>());
    return out;
  };
  const auto fa = files_of(ma), fb = files_of(mb);
  CompareReport rep;
  auto field = [](const Json& m, const char* k) {
    return m.contains("resolved") && m.at("resolved").contains(k) ? m.at("resolved").at(k).dump() : std::string();
  };
  if (field(ma, "gamma") != field(mb, "gamma") || field(ma, "variant") != field(mb, "variant"))
    rep.warnings.emplace_back("inputs differ");
  if (field(ma, "levels") != field(mb, "levels")) rep.warnings.emplace_back("levels differ");

  std::vector<std::string> usable;
  for (const auto& k : keys) {
    const std::string name = k + ".csv";
    if (fa.count(name) && fb.count(name)) {
      usable.push_back(k);
    } else {
      rep.warnings.push_back("key " + k + " missing from one run");
    }
  }
  if (usable.empty()) throw invalid("compare: the runs share none of the requested products");

  const fs::path da = manifest_a.parent_path(), db = manifest_b.parent_path();
  const std::set<std::string> flags{"trusted", "certified", "samples", "skipped", "level", "row", "sequence"};
  for (const auto& key : usable) {
    Csv a = Csv::parse(read_file(da / (key + ".csv")));
    Csv b = Csv::parse(read_file(db / (key + ".csv")));
    std::map<std::string, size_t> index_b;
    for (size_t i = 0; i < b.body().size(); ++i) index_b[b.body()[i][0]] = i;
    const int ta = a.column("trusted"), tb = b.column("trusted");
    std::vector<std::pair<size_t, size_t>> matched;
    for (size_t i = 0; i < a.body().size(); ++i) {
      auto it = index_b.find(a.body()[i][0]);
      if (it == index_b.end()) continue;
      if (ta >= 0 && a.body()[i][static_cast<size_t>(ta)] != "1") continue;
      if (tb >= 0 && b.body()[it->second][static_cast<size_t>(tb)] != "1") continue;
      matched.emplace_back(i, it->second);
      if (max_rows >= 0 && static_cast<int>(matched.size()) >= max_rows) break;
    }
    for (size_t col = 1; col < a.header().size(); ++col) {
      const std::string& name = a.header()[col];
      if (flags.count(name)) continue;
      const int cb = b.column(name);
      if (cb < 0) continue;
      CompareColumn c{key, name, 0, Real(0), Real(0)};
      for (const auto& [ia, ib] : matched) {
        const std::string& sa = a.body()[ia][col];
        const std::string& sb = b.body()[ib][static_cast<size_t>(cb)];
        if (sa.empty() || sb.empty()) continue;
        const Real va = parse_real(sa), vb = parse_real(sb);
        const Real diff = mp::abs(va - vb);
        const Real scale = mp::max(mp::abs(va), mp::abs(vb));
        c.max_abs = mp::max(c.max_abs, diff);
        if (scale > 0) c.max_rel = mp::max(c.max_rel, Real(diff / scale));
        ++c.rows;
      }
      rep.columns.push_back(std::move(c));
    }
  }
  return rep;
}

}  // namespace cantorlab
