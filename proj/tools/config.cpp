#include "config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dtnlab/errors.hpp"

namespace dtnlab::cli {

using nlohmann::json;

namespace {

const json kDefaultDomain = {{"type", "square"}, {"n", 16}};
const json kDefaultGamma0 = {{"sides", json::array({0})}};
// json::array keeps two-string lists from being read as key/value pairs.
const json kDefaultCoefficients = {{"a", json::array({json::array({"1", "0"}), json::array({"0", "1"})})},
                                   {"drift", json::array({"0", "0"})},
                                   {"a0", "0"}};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw InvalidInput("unknown key '" + key + "' in " + where);
  }
}

// Coefficient entries may be given as numbers or exprlang strings.
std::string expr_text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw InvalidInput(where + " must be a string or a number");
}

json normalize_coefficients(const json& c) {
  reject_unknown(c, {"a", "drift", "codrift", "a0"}, "coefficients");
  json out;
  const json a = c.value("a", kDefaultCoefficients["a"]);
  if (!a.is_array() || a.size() != 2 || !a[0].is_array() || a[0].size() != 2 || !a[1].is_array() ||
      a[1].size() != 2) {
    throw InvalidInput("coefficients.a must be a 2x2 array");
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out["a"][i][j] = expr_text(a[i][j], "coefficients.a");
  }
  const json drift = c.value("drift", kDefaultCoefficients["drift"]);
  if (!drift.is_array() || drift.size() != 2) throw InvalidInput("coefficients.drift must have two entries");
  out["drift"] = json::array({expr_text(drift[0], "drift"), expr_text(drift[1], "drift")});
  const json codrift = c.value("codrift", out["drift"]);
  if (!codrift.is_array() || codrift.size() != 2) throw InvalidInput("coefficients.codrift must have two entries");
  out["codrift"] = json::array({expr_text(codrift[0], "codrift"), expr_text(codrift[1], "codrift")});
  out["a0"] = expr_text(c.value("a0", json("0")), "coefficients.a0");
  // Syntax is checked here so errors surface before any computation.
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) parse_expr(out["a"][i][j].get<std::string>());
    parse_expr(out["drift"][i].get<std::string>());
    parse_expr(out["codrift"][i].get<std::string>());
  }
  parse_expr(out["a0"].get<std::string>());
  return out;
}

json normalize_domain(const json& d) {
  if (!d.is_object() || !d.contains("type")) throw InvalidInput("domain needs a 'type'");
  const std::string type = d["type"].get<std::string>();
  json out = d;
  if (type == "square") {
    reject_unknown(d, {"type", "n"}, "domain");
    out["n"] = d.value("n", 16);
    if (out["n"].get<int>() < 1) throw InvalidInput("domain.n must be >= 1");
  } else if (type == "lshape") {
    reject_unknown(d, {"type", "h"}, "domain");
    out["h"] = d.value("h", 0.0625);
  } else if (type == "regular_polygon") {
    reject_unknown(d, {"type", "sides", "radius", "h"}, "domain");
    const int sides = d.value("sides", 64);
    const double radius = d.value("radius", 1.0);
    out["sides"] = sides;
    out["radius"] = radius;
    out["h"] = d.value("h", 2.0 * radius * std::sin(M_PI / sides));
  } else if (type == "polygon") {
    reject_unknown(d, {"type", "vertices", "h"}, "domain");
    if (!d.contains("vertices") || !d["vertices"].is_array() || d["vertices"].size() < 3) {
      throw InvalidInput("domain.vertices needs at least three [x, y] pairs");
    }
    out["h"] = d.value("h", 0.1);
  } else {
    throw InvalidInput("unknown domain type '" + type + "'");
  }
  if (out.contains("h") && !(out["h"].get<double>() > 0.0)) throw InvalidInput("domain.h must be positive");
  return out;
}

json normalize_gamma0(const json& g) {
  if (g.is_string() && g.get<std::string>() == "none") return {{"sides", json::array()}};
  reject_unknown(g, {"sides", "predicate"}, "gamma0");
  if (g.contains("sides") == g.contains("predicate")) {
    throw InvalidInput("gamma0 needs exactly one of 'sides' or 'predicate'");
  }
  if (g.contains("predicate")) parse_expr(g["predicate"].get<std::string>());
  return g;
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidInput(where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json ExperimentConfig::resolved() const {
  json j;
  j["name"] = name;
  j["domain"] = domain;
  j["gamma0"] = gamma0;
  j["coefficients"] = coefficients;
  if (coefficients_b) j["coefficients_b"] = *coefficients_b;
  j["lambda"] = lambda;
  j["lambda_gaps"] = lambda_gaps;
  j["mu"] = mu;
  j["mu_min"] = mu_min;
  j["mu_max"] = mu_max;
  j["mu_steps"] = mu_steps;
  j["k"] = k;
  j["t"] = t;
  j["trials"] = trials;
  j["seed"] = seed;
  j["refinements"] = refinements;
  j["lump_boundary_mass"] = lump_boundary_mass;
  j["lump_potential"] = lump_potential;
  j["semigroup"] = semigroup;
  j["limit"] = limit;
  j["gauge"] = gauge;
  j["output"] = output;
  return j;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : resolved().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j, {"name", "domain", "gamma0", "coefficients", "coefficients_b", "lambda", "lambda_gaps", "mu",
                     "mu_min", "mu_max", "mu_steps", "k", "t", "trials", "seed", "refinements",
                     "lump_boundary_mass", "lump_potential", "semigroup", "limit", "gauge", "output"},
                 "config");
  ExperimentConfig c;
  c.name = j.value("name", c.name);
  c.domain = normalize_domain(j.value("domain", kDefaultDomain));
  c.gamma0 = normalize_gamma0(j.value("gamma0", kDefaultGamma0));
  c.coefficients = normalize_coefficients(j.value("coefficients", json::object()));
  if (j.contains("coefficients_b")) c.coefficients_b = normalize_coefficients(j["coefficients_b"]);
  if (j.contains("lambda")) c.lambda = number_list(j["lambda"], "lambda");
  c.lambda_gaps = j.value("lambda_gaps", c.lambda_gaps);
  c.mu = j.contains("mu") ? number_list(j["mu"], "mu") : std::vector<double>{-5.0, 0.0, 5.0};
  c.mu_min = j.value("mu_min", c.mu_min);
  c.mu_max = j.value("mu_max", c.mu_max);
  c.mu_steps = j.value("mu_steps", c.mu_steps);
  c.k = j.value("k", c.k);
  c.t = j.contains("t") ? number_list(j["t"], "t") : std::vector<double>{0.1, 1.0, 10.0};
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.refinements = j.value("refinements", c.refinements);
  c.lump_boundary_mass = j.value("lump_boundary_mass", c.lump_boundary_mass);
  c.lump_potential = j.value("lump_potential", c.lump_potential);
  c.output = j.value("output", c.output);

  c.semigroup = j.value("semigroup", json::object());
  reject_unknown(c.semigroup, {"domination_sides", "potential_shift"}, "semigroup");
  c.limit = j.value("limit", json::object());
  reject_unknown(c.limit, {"mu", "k"}, "limit");
  if (!c.limit.contains("mu")) c.limit["mu"] = {-1e2, -1e3, -1e4};
  if (!c.limit.contains("k")) c.limit["k"] = 4;
  c.gauge = j.value("gauge", json::object());
  reject_unknown(c.gauge, {"domain", "gamma0", "epsilon", "map", "jacobian", "lambda", "mu", "k"}, "gauge");
  if (!c.gauge.contains("domain")) c.gauge["domain"] = {{"type", "square"}, {"n", 4}};
  c.gauge["domain"] = normalize_domain(c.gauge["domain"]);
  if (!c.gauge.contains("gamma0")) c.gauge["gamma0"] = c.gamma0;
  if (!c.gauge.contains("map") && !c.gauge.contains("epsilon")) c.gauge["epsilon"] = 0.15;
  if (c.gauge.contains("map") != c.gauge.contains("jacobian")) {
    throw InvalidInput("gauge.map and gauge.jacobian go together");
  }
  if (!c.gauge.contains("lambda")) c.gauge["lambda"] = {1.0, 5.0};
  if (!c.gauge.contains("mu")) c.gauge["mu"] = {-5.0, 0.0, 5.0};
  if (!c.gauge.contains("k")) c.gauge["k"] = 6;

  if (c.k < 1) throw InvalidInput("k must be >= 1");
  if (c.mu_steps < 2 || !(c.mu_max > c.mu_min)) throw InvalidInput("need mu_steps >= 2 and mu_max > mu_min");
  if (c.trials < 1) throw InvalidInput("trials must be >= 1");
  if (c.refinements < 0) throw InvalidInput("refinements must be >= 0");
  if (c.lambda_gaps < 1) throw InvalidInput("lambda_gaps must be >= 1");
  for (double t : c.t) {
    if (!(t >= 0.0)) throw InvalidInput("times must be nonnegative");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return config_from_json(json::object());
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path);
  return config_from_json(json::parse(in, nullptr, true, true));
}

Mesh build_domain(const json& raw) {
  const json d = normalize_domain(raw);
  const std::string type = d["type"].get<std::string>();
  if (type == "square") return build_structured_square(d["n"].get<int>());
  if (type == "lshape") {
    const auto poly = l_shape_polygon();
    return build_polygon_mesh(poly, d["h"].get<double>());
  }
  if (type == "regular_polygon") {
    const auto poly = regular_polygon(d["sides"].get<int>(), d["radius"].get<double>());
    return build_polygon_mesh(poly, d["h"].get<double>());
  }
  std::vector<Point> poly;
  for (const auto& v : d["vertices"]) {
    if (!v.is_array() || v.size() != 2) throw InvalidInput("polygon vertices must be [x, y] pairs");
    poly.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return build_polygon_mesh(poly, d["h"].get<double>());
}

BoundaryPartition build_partition(const Mesh& mesh, const json& raw) {
  const json g = normalize_gamma0(raw);
  if (g.contains("predicate")) {
    const Expr e = parse_expr(g["predicate"].get<std::string>());
    return partition_boundary(mesh, [e](Point p) { return e.eval(p.x, p.y) > 0.0; });
  }
  std::vector<int> sides;
  for (const auto& s : g["sides"]) sides.push_back(s.get<int>());
  return partition_by_sides(mesh, sides);
}

CoefficientSet build_coefficients(const json& raw) {
  const json c = normalize_coefficients(raw);
  std::array<std::array<std::string, 2>, 2> a;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) a[i][j] = c["a"][i][j].get<std::string>();
  }
  const std::array<std::string, 2> drift{c["drift"][0].get<std::string>(), c["drift"][1].get<std::string>()};
  const std::array<std::string, 2> codrift{c["codrift"][0].get<std::string>(), c["codrift"][1].get<std::string>()};
  return CoefficientSet::from_exprs(coefficient_exprs(a, drift, &codrift, c["a0"].get<std::string>()));
}

Diffeo build_diffeo(const json& g) {
  if (!g.contains("map")) return square_bump_diffeo(g["epsilon"].get<double>());
  Diffeo d;
  for (int i = 0; i < 2; ++i) {
    d.map[i] = parse_expr(g["map"][i].get<std::string>());
    for (int j = 0; j < 2; ++j) d.jacobian[i][j] = parse_expr(g["jacobian"][i][j].get<std::string>());
  }
  d.boundary_fixed = true;
  return d;
}

}  // namespace dtnlab::cli
