#include "plurikit/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "plurikit/errors.hpp"

namespace plurikit {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config " + where + ": " + what);
}

double finite_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

long long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long long>();
}

Complex complex_value(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected a [re, im] pair");
  return {finite_number(j[0], where + "[0]"), finite_number(j[1], where + "[1]")};
}

std::vector<Complex> complex_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of [re, im] pairs");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_value(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

ComplexColumns complex_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of lists");
  ComplexColumns out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_list(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(finite_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

// Reads known keys from an object and rejects anything else.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(where_, "expected an object");
  }
  ~Reader() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) {
    if (!has(key)) fail(where_, "missing required key '" + key + "'");
    return j_.at(key);
  }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  double number(const std::string& key, double fallback) {
    return has(key) ? finite_number(j_.at(key), path(key)) : fallback;
  }
  int small_int(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const long long v = integer(j_.at(key), path(key));
    if (v < -1'000'000'000LL || v > 1'000'000'000LL) fail(path(key), "out of range");
    return static_cast<int>(v);
  }
  std::uint64_t unsigned_int(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail(path(key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }
  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    return has(key) ? unsigned_int(key) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) fail(path(key), "expected true or false");
    return j_.at(key).get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) fail(path(key), "expected a string");
    return j_.at(key).get<std::string>();
  }
  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) fail(where_, "unknown key '" + item.key() + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json to_json(Complex c) { return json::array({c.real(), c.imag()}); }

json to_json(const std::vector<Complex>& v) {
  json out = json::array();
  for (const auto& c : v) out.push_back(to_json(c));
  return out;
}

json to_json(const ComplexColumns& m) {
  json out = json::array();
  for (const auto& v : m) out.push_back(to_json(v));
  return out;
}

HoloSpec parse_holo(const json& j, const std::string& where) {
  Reader r(j, where);
  HoloSpec s;
  s.family = r.string("family", "");
  s.n_vars = r.small_int("n_vars", 0);
  if (s.n_vars < 1 || s.n_vars > kMaxDim) fail(r.path("n_vars"), "must be between 1 and 16");
  if (s.family == "polynomial") {
    const json& terms = r.at("terms");
    if (!terms.is_array() || terms.empty()) fail(r.path("terms"), "expected a non-empty list");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tw = r.path("terms") + "[" + std::to_string(i) + "]";
      Reader t(terms[i], tw);
      PolynomialTerm term;
      const json& ex = t.at("exponents");
      if (!ex.is_array() || static_cast<int>(ex.size()) != s.n_vars) fail(t.path("exponents"), "needs n_vars entries");
      for (std::size_t e = 0; e < ex.size(); ++e) {
        const long long v = integer(ex[e], t.path("exponents"));
        if (v < 0 || v > 1000) fail(t.path("exponents"), "exponents must be in [0, 1000]");
        term.exponents.push_back(static_cast<int>(v));
      }
      term.coefficient = complex_value(t.at("coefficient"), t.path("coefficient"));
      t.finish();
      s.terms.push_back(std::move(term));
    }
  } else if (s.family == "exp_graph" || s.family == "sin_graph") {
    s.index = r.small_int("index", s.n_vars - 1);
    s.linear = complex_list(r.at("linear"), r.path("linear"));
    s.constant = r.has("constant") ? complex_value(r.at("constant"), r.path("constant")) : Complex{};
  } else if (s.family == "affine_product") {
    const json& factors = r.at("factors");
    if (!factors.is_array() || factors.empty()) fail(r.path("factors"), "expected a non-empty list");
    for (std::size_t i = 0; i < factors.size(); ++i) {
      Reader t(factors[i], r.path("factors") + "[" + std::to_string(i) + "]");
      AffineForm form;
      form.linear = complex_list(t.at("linear"), t.path("linear"));
      form.constant = t.has("constant") ? complex_value(t.at("constant"), t.path("constant")) : Complex{};
      t.finish();
      s.factors.push_back(std::move(form));
    }
  } else {
    fail(r.path("family"), "unknown function family '" + s.family +
                               "' (expected polynomial, exp_graph, sin_graph or affine_product)");
  }
  r.finish();
  return s;
}

json holo_to_json(const HoloSpec& s) {
  json j;
  j["family"] = s.family;
  j["n_vars"] = s.n_vars;
  if (s.family == "polynomial") {
    json terms = json::array();
    for (const auto& t : s.terms) terms.push_back({{"exponents", t.exponents}, {"coefficient", to_json(t.coefficient)}});
    j["terms"] = terms;
  } else if (s.family == "affine_product") {
    json factors = json::array();
    for (const auto& f : s.factors) factors.push_back({{"linear", to_json(f.linear)}, {"constant", to_json(f.constant)}});
    j["factors"] = factors;
  } else {
    j["index"] = s.index;
    j["linear"] = to_json(s.linear);
    j["constant"] = to_json(s.constant);
  }
  return j;
}

CurrentSpec parse_current(const json& j, const std::string& where, int depth = 0) {
  if (depth > 8) fail(where, "nesting too deep");
  Reader r(j, where);
  CurrentSpec s;
  s.kind = r.string("kind", "");
  if (s.kind == "zero_set") {
    s.function = parse_holo(r.at("function"), r.path("function"));
  } else if (s.kind == "potential") {
    s.family = r.string("family", "");
    s.n = r.small_int("n", 0);
    if (s.family == "log_smooth_max") {
      s.index = r.small_int("index", 0);
      s.r0 = r.number("r0", 1.0);
    } else if (s.family == "log_abs") {
      s.function = parse_holo(r.at("function"), r.path("function"));
    } else if (s.family != "log_norm" && s.family != "norm_sq") {
      fail(r.path("family"), "unknown potential family '" + s.family + "'");
    }
  } else if (s.kind == "const_form") {
    s.family = r.string("family", "kahler");
    s.n = r.small_int("n", 0);
    if (s.family == "block") {
      s.begin = r.small_int("begin", 0);
      s.end = r.small_int("end", 0);
    } else if (s.family == "matrix") {
      s.k = r.small_int("k", 1);
      s.coefficients = complex_matrix(r.at("coefficients"), r.path("coefficients"));
    } else if (s.family != "kahler") {
      fail(r.path("family"), "unknown const_form family '" + s.family + "' (expected kahler, block or matrix)");
    }
  } else if (s.kind == "nonneg_sum") {
    const json& terms = r.at("terms");
    if (!terms.is_array() || terms.empty()) fail(r.path("terms"), "expected a non-empty list");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tw = r.path("terms") + "[" + std::to_string(i) + "]";
      Reader t(terms[i], tw);
      const double w = t.number("weight", 1.0);
      if (w < 0.0) fail(t.path("weight"), "weights must be nonnegative");
      s.weights.push_back(w);
      s.terms.push_back(parse_current(t.at("current"), t.path("current"), depth + 1));
      t.finish();
    }
  } else {
    fail(r.path("kind"), "unknown current kind '" + s.kind +
                             "' (expected zero_set, potential, const_form or nonneg_sum)");
  }
  r.finish();
  return s;
}

json current_to_json(const CurrentSpec& s) {
  json j;
  j["kind"] = s.kind;
  if (s.kind == "zero_set") {
    j["function"] = holo_to_json(*s.function);
  } else if (s.kind == "potential") {
    j["family"] = s.family;
    j["n"] = s.n;
    if (s.family == "log_smooth_max") {
      j["index"] = s.index;
      j["r0"] = s.r0;
    } else if (s.family == "log_abs") {
      j["function"] = holo_to_json(*s.function);
    }
  } else if (s.kind == "const_form") {
    j["family"] = s.family;
    j["n"] = s.n;
    if (s.family == "block") {
      j["begin"] = s.begin;
      j["end"] = s.end;
    } else if (s.family == "matrix") {
      j["k"] = s.k;
      j["coefficients"] = to_json(s.coefficients);
    }
  } else {
    json terms = json::array();
    for (std::size_t i = 0; i < s.terms.size(); ++i)
      terms.push_back({{"weight", s.weights[i]}, {"current", current_to_json(s.terms[i])}});
    j["terms"] = terms;
  }
  return j;
}

RegionConfig parse_region(const json& j, const std::string& where) {
  Reader r(j, where);
  RegionConfig s;
  s.shape = r.string("shape", "ball");
  if (s.shape != "ball" && s.shape != "box") fail(r.path("shape"), "expected ball or box");
  if (r.has("center")) s.center = complex_list(r.at("center"), r.path("center"));
  s.size = r.number("size", 1.0);
  if (s.size <= 0.0) fail(r.path("size"), "must be positive (degenerate region)");
  r.finish();
  return s;
}

json region_to_json(const RegionConfig& s) {
  return {{"shape", s.shape}, {"center", to_json(s.center)}, {"size", s.size}};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Reader r(root, "$");

  {
    Reader s(r.at("space"), r.path("space"));
    c.n = s.small_int("n", 0);
    if (c.n < 1 || c.n > kMaxDim) fail(s.path("n"), "must be between 1 and 16");
    if (s.has("m")) {
      c.m = s.small_int("m", 0);
      if (*c.m < 1 || c.n + *c.m > kMaxDim) fail(s.path("m"), "must be >= 1 with n + m <= 16");
    }
    s.finish();
  }
  if (r.has("current")) c.current = parse_current(r.at("current"), r.path("current"));
  if (r.has("grid")) {
    Reader g(r.at("grid"), r.path("grid"));
    c.grid.r_min = g.number("r_min", c.grid.r_min);
    c.grid.r_max = g.number("r_max", c.grid.r_max);
    c.grid.points = g.small_int("points", c.grid.points);
    g.finish();
    if (c.grid.r_min <= 0.0 || c.grid.r_max <= c.grid.r_min) fail(r.path("grid"), "need 0 < r_min < r_max");
    if (c.grid.points < 4 || c.grid.points > 100000) fail(r.path("grid.points"), "need between 4 and 100000 points");
  }
  {
    Reader m(r.at("mc"), r.path("mc"));
    c.mc.budget = m.unsigned_int("budget", c.mc.budget);
    c.mc.seed = m.unsigned_int("seed");
    c.mc.exact_const_form = m.boolean("exact_const_form", false);
    c.mc.stencil_step = m.number("stencil_step", c.mc.stencil_step);
    m.finish();
    if (c.mc.budget < 1000) fail(r.path("mc.budget"), "must be at least 1000");
    if (c.mc.stencil_step <= 0.0 || c.mc.stencil_step >= 1.0) fail(r.path("mc.stencil_step"), "must be in (0, 1)");
  }
  if (r.has("grassmannian")) {
    Reader g(r.at("grassmannian"), r.path("grassmannian"));
    c.grassmannian.q = g.small_int("q", 1);
    c.grassmannian.frames = g.unsigned_int("frames", c.grassmannian.frames);
    if (g.has("forced_frames")) {
      const json& ff = g.at("forced_frames");
      if (!ff.is_array()) fail(g.path("forced_frames"), "expected a list of frames");
      for (std::size_t i = 0; i < ff.size(); ++i)
        c.grassmannian.forced_frames.push_back(complex_matrix(ff[i], g.path("forced_frames") + "[" + std::to_string(i) + "]"));
    }
    g.finish();
    if (c.grassmannian.frames < 1) fail(r.path("grassmannian.frames"), "must be at least 1");
  }
  if (r.has("cap")) {
    Reader g(r.at("cap"), r.path("cap"));
    if (g.has("center")) c.cap.center = complex_matrix(g.at("center"), g.path("center"));
    c.cap.theta = g.number("theta", c.cap.theta);
    g.finish();
  }
  if (r.has("regions")) {
    Reader g(r.at("regions"), r.path("regions"));
    if (g.has("D")) c.region_d = parse_region(g.at("D"), g.path("D"));
    if (g.has("D_prime")) c.region_d_prime = parse_region(g.at("D_prime"), g.path("D_prime"));
    g.finish();
  }
  if (r.has("alpha_set")) c.alpha_set = number_list(r.at("alpha_set"), r.path("alpha_set"));
  if (r.has("r_sequence")) c.r_sequence = number_list(r.at("r_sequence"), r.path("r_sequence"));
  if (r.has("chi")) {
    Reader g(r.at("chi"), r.path("chi"));
    c.chi.rho0 = g.number("rho0", c.chi.rho0);
    if (g.has("probe_grid")) c.chi.probe_grid = number_list(g.at("probe_grid"), g.path("probe_grid"));
    if (g.has("table")) c.chi.table = number_list(g.at("table"), g.path("table"));
    g.finish();
  }
  if (r.has("order")) {
    Reader g(r.at("order"), r.path("order"));
    c.order.flatness_tol = g.number("flatness_tol", c.order.flatness_tol);
    c.order.type.eps_min = g.number("eps_min", c.order.type.eps_min);
    c.order.type.sigma_max = g.number("sigma_max", c.order.type.sigma_max);
    c.order.type.log_slope = g.number("log_slope", c.order.type.log_slope);
    c.order.rho0 = g.number("rho0", c.order.rho0);
    g.finish();
  }
  c.exploratory = r.boolean("exploratory", false);
  c.output = r.string("output", "");
  r.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["space"] = {{"n", c.n}};
  if (c.m) j["space"]["m"] = *c.m;
  if (c.current) j["current"] = current_to_json(*c.current);
  j["grid"] = {{"r_min", c.grid.r_min}, {"r_max", c.grid.r_max}, {"points", c.grid.points}};
  j["mc"] = {{"budget", c.mc.budget},
             {"seed", c.mc.seed},
             {"exact_const_form", c.mc.exact_const_form},
             {"stencil_step", c.mc.stencil_step}};
  json forced = json::array();
  for (const auto& f : c.grassmannian.forced_frames) forced.push_back(to_json(f));
  j["grassmannian"] = {{"q", c.grassmannian.q}, {"frames", c.grassmannian.frames}, {"forced_frames", forced}};
  j["cap"] = {{"center", to_json(c.cap.center)}, {"theta", c.cap.theta}};
  j["regions"] = {{"D", region_to_json(c.region_d)}, {"D_prime", region_to_json(c.region_d_prime)}};
  j["alpha_set"] = c.alpha_set;
  j["r_sequence"] = c.r_sequence;
  j["chi"] = {{"rho0", c.chi.rho0}, {"probe_grid", c.chi.probe_grid}, {"table", c.chi.table}};
  j["order"] = {{"flatness_tol", c.order.flatness_tol},
                {"eps_min", c.order.type.eps_min},
                {"sigma_max", c.order.type.sigma_max},
                {"log_slope", c.order.type.log_slope},
                {"rho0", c.order.rho0}};
  j["exploratory"] = c.exploratory;
  j["output"] = c.output;
  return j.dump(2) + "\n";
}

HoloFunction build_holo(const HoloSpec& s) {
  if (s.family == "polynomial") return HoloFunction::polynomial(PolynomialMap{s.n_vars, s.terms});
  if (s.family == "exp_graph" || s.family == "sin_graph") {
    require(static_cast<int>(s.linear.size()) == s.n_vars, "graph family: linear needs n_vars coefficients");
    require(s.index >= 0 && s.index < s.n_vars, "graph family: index out of range");
    return s.family == "exp_graph" ? HoloFunction::exp_graph(s.n_vars, s.index, s.linear, s.constant)
                                   : HoloFunction::sin_graph(s.n_vars, s.index, s.linear, s.constant);
  }
  if (s.family == "affine_product") {
    for (const auto& f : s.factors)
      require(static_cast<int>(f.linear.size()) == s.n_vars, "affine_product: each factor needs n_vars coefficients");
    return HoloFunction::affine_product(s.n_vars, s.factors);
  }
  throw ConfigError("unknown function family '" + s.family + "'");
}

Current build_current(const CurrentSpec& s, int ambient) {
  const int n = s.n > 0 ? s.n : ambient;
  require(n == ambient, "current dimension does not match the configured space");
  if (s.kind == "zero_set") {
    require(s.function.has_value(), "zero_set needs a function");
    require(s.function->n_vars == ambient, "zero_set function has the wrong number of variables");
    return Current::zero_set(build_holo(*s.function));
  }
  if (s.kind == "potential") {
    if (s.family == "log_norm") return Current::potential(PshFunction::log_norm(n));
    if (s.family == "norm_sq") return Current::potential(PshFunction::norm_sq(n));
    if (s.family == "log_smooth_max") {
      require(s.index >= 0 && s.index < n, "log_smooth_max: index out of range");
      require(s.r0 > 0.0, "log_smooth_max: r0 must be positive");
      return Current::potential(PshFunction::log_smooth_max(n, s.index, s.r0));
    }
    require(s.function.has_value() && s.function->n_vars == n, "log_abs potential needs a function on the space");
    return Current::potential(PshFunction::log_abs(build_holo(*s.function)));
  }
  if (s.kind == "const_form") {
    if (s.family == "kahler") return Current::const_form(ConstForm::kahler(n));
    if (s.family == "block") return Current::const_form(ConstForm::block_kahler(n, s.begin, s.end));
    const auto rows = static_cast<Eigen::Index>(s.coefficients.size());
    CMatrix h(rows, rows);
    for (Eigen::Index a = 0; a < rows; ++a) {
      require(static_cast<Eigen::Index>(s.coefficients[static_cast<std::size_t>(a)].size()) == rows,
              "const_form: coefficient matrix must be square");
      for (Eigen::Index b = 0; b < rows; ++b) h(a, b) = s.coefficients[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
    return Current::const_form(ConstForm::general(n, s.k, h));
  }
  std::vector<std::pair<double, Current>> terms;
  for (std::size_t i = 0; i < s.terms.size(); ++i) terms.emplace_back(s.weights[i], build_current(s.terms[i], ambient));
  return Current::nonneg_sum(terms);
}

int ambient_dim(const RunConfig& config) { return config.n + config.m.value_or(0); }

Current build_current(const RunConfig& config) {
  require(config.current.has_value(), "this command needs a 'current' block");
  return build_current(*config.current, ambient_dim(config));
}

RadialGrid build_grid(const GridSpec& s) {
  return RadialGrid::geometric(s.r_min, s.r_max, static_cast<std::size_t>(s.points));
}

ProfileOptions build_profile_options(const McSpec& s) {
  ProfileOptions o;
  o.budget = s.budget;
  o.seed = s.seed;
  o.exact_const_form = s.exact_const_form;
  o.stencil_step = s.stencil_step;
  return o;
}

namespace {

Frame frame_from_columns(const ComplexColumns& columns, int n) {
  require(!columns.empty(), "frame needs at least one column");
  CMatrix m(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    require(static_cast<int>(columns[j].size()) == n, "frame column has the wrong dimension");
    for (int i = 0; i < n; ++i) m(i, static_cast<Eigen::Index>(j)) = columns[j][static_cast<std::size_t>(i)];
  }
  return Frame::from_columns(m, 1e-9);
}

}  // namespace

FrameOptions build_frame_options(const RunConfig& config) {
  FrameOptions o;
  o.count = config.grassmannian.frames;
  for (const auto& f : config.grassmannian.forced_frames) o.forced.push_back(frame_from_columns(f, ambient_dim(config)));
  return o;
}

CapSpec build_cap(const RunConfig& config) {
  CapSpec cap;
  const int n = ambient_dim(config);
  cap.center = config.cap.center.empty() ? Frame::standard(config.grassmannian.q, n) : frame_from_columns(config.cap.center, n);
  cap.theta = config.cap.theta;
  return cap;
}

RegionSpec build_region(const RegionConfig& s, int dim) {
  RegionSpec region;
  region.shape = s.shape == "box" ? RegionShape::box : RegionShape::ball;
  region.center = s.center.empty() ? std::vector<Complex>(static_cast<std::size_t>(dim)) : s.center;
  region.size = s.size;
  region.validate(dim);
  return region;
}

ProductSpace build_space(const RunConfig& config) {
  require(config.m.has_value(), "this command needs a product space (space.m)");
  return ProductSpace{config.n, *config.m};
}

}  // namespace plurikit
