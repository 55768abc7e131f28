#include "run_config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "kappa/conformal.hpp"
#include "kappa/errors.hpp"

namespace kappa::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kFieldNames = {"f", "k", "ell", "phi", "psi", "V"};

void allow_only(const json& obj, const std::set<std::string>& keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!keys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

double number(const json& obj, const std::string& key, const std::string& where, std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing '" + key + "'");
  }
  if (!obj[key].is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  const double v = obj[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": '" + key + "' must be finite");
  return v;
}

int integer(const json& obj, const std::string& key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ConfigError(where + ": '" + key + "' must be an integer");
  return obj[key].get<int>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(where + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Point point(const json& v, const std::string& where) {
  if (v.is_string()) return parse_point(v.get<std::string>());
  const auto c = numbers(v, where);
  if (c.empty() || c.size() > static_cast<size_t>(kMaxDim)) throw ConfigError(where + ": points have 1 to 3 coordinates");
  Point p(static_cast<int>(c.size()));
  for (size_t i = 0; i < c.size(); ++i) p[static_cast<int>(i)] = c[i];
  return p;
}

Point point_or(const json& obj, const std::string& key, const std::string& where, const Point& fallback) {
  return obj.contains(key) ? point(obj[key], where + "." + key) : fallback;
}

json type_entry(const std::string& type, const std::string& description) {
  return {{"type", type}, {"description", description}};
}

}  // namespace

Point parse_point(const std::string& text) {
  std::vector<double> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      c.push_back(std::stod(item, &used));
      if (used != item.size()) throw ConfigError("bad coordinate '" + item + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad coordinate '" + item + "' in '" + text + "'");
    }
  }
  if (c.empty() || c.size() > static_cast<size_t>(kMaxDim)) throw ConfigError("points have 1 to 3 coordinates: '" + text + "'");
  Point p(static_cast<int>(c.size()));
  for (size_t i = 0; i < c.size(); ++i) p[static_cast<int>(i)] = c[i];
  return p;
}

const json& config_schema() {
  static const json schema = [] {
    const json point_def = {{"description", "coordinates, as an array or a \"x,y\" string"},
                            {"oneOf", json::array({{{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 1}, {"maxItems", 3}},
                                                   {{"type", "string"}}})}};
    const json domain_def = {
        {"description", "interval {lower, upper}; box {lower, upper}; disc {center?, radius}; "
                        "ball / ball_complement {center? | dim?, radius}; half_space {dim, axis, level}"},
        {"type", "object"},
        {"required", {"type"}},
        {"additionalProperties", false},
        {"properties",
         {{"type", {{"enum", {"interval", "box", "disc", "ball", "ball_complement", "half_space"}}}},
          {"lower", {}},
          {"upper", {}},
          {"center", {{"$ref", "#/$defs/point"}}},
          {"radius", {{"type", "number"}, {"exclusiveMinimum", 0}}},
          {"dim", {{"type", "integer"}, {"minimum", 1}, {"maximum", 3}}},
          {"axis", {{"type", "integer"}, {"minimum", 0}}},
          {"level", {{"type", "number"}}}}}};
    const json field_def = {
        {"description",
         "a number (constant), a preset name (\"zero\", \"log-annulus\"), or an object: "
         "constant {value}; affine {a, b}; sine / cosine {amp, freq, phase, axis}; polynomial {coeffs, axis}; "
         "radial {coeffs, center}; log_radial {center, scale, coeff}; signed_distance {}; "
         "convexification {eps}; sum {terms}"},
        {"oneOf",
         json::array({{{"type", "number"}},
                      {{"enum", {"zero", "log-annulus"}}},
                      {{"type", "object"},
                       {"required", {"type"}},
                       {"additionalProperties", false},
                       {"properties",
                        {{"type",
                          {{"enum",
                            {"constant", "affine", "sine", "cosine", "polynomial", "radial", "log_radial",
                             "signed_distance", "convexification", "sum"}}}},
                         {"value", {{"type", "number"}}},
                         {"a", {{"$ref", "#/$defs/point"}}},
                         {"b", {{"type", "number"}}},
                         {"amp", {{"type", "number"}}},
                         {"freq", {{"type", "number"}}},
                         {"phase", {{"type", "number"}}},
                         {"axis", {{"type", "integer"}, {"minimum", 0}}},
                         {"coeffs", {{"type", "array"}, {"items", {{"type", "number"}}}}},
                         {"center", {{"$ref", "#/$defs/point"}}},
                         {"scale", {{"type", "number"}, {"exclusiveMinimum", 0}}},
                         {"coeff", {{"type", "number"}}},
                         {"eps", {{"type", "number"}}},
                         {"terms", {{"type", "array"}, {"items", {{"$ref", "#/$defs/field"}}}}}}}}})}};
    json props = {
        {"seed", type_entry("integer", "master seed; every random stream derives from it")},
        {"threads", type_entry("integer", "worker count; overrides KAPPA_THREADS")},
        {"out", type_entry("string", "output directory; tables go to stdout when absent")},
        {"format", {{"enum", {"csv", "json"}}, {"description", "summary format"}}},
        {"paths", type_entry("integer", "Monte-Carlo path count")},
        {"dt", type_entry("number", "path step h, or the sampling step of flow")},
        {"grid", type_entry("integer", "PDE resolution, or the vertex count of geodesic")},
        {"tolerance_scale", type_entry("number", "multiplies every discretization allowance")},
        {"domain", {{"$ref", "#/$defs/domain"}}},
        {"x0", {{"$ref", "#/$defs/point"}}},
        {"from", {{"$ref", "#/$defs/point"}}},
        {"to", {{"$ref", "#/$defs/point"}}},
        {"t", type_entry("number", "semigroup time (heat), path horizon (simulate) or flow time")},
        {"j", type_entry("integer", "Cantor level, 0..12")},
        {"bump", {{"enum", {"cos2", "poly"}}, {"description", "Cantor bump"}}}};
    for (const auto& name : kFieldNames) props[name] = {{"$ref", "#/$defs/field"}};
    props["seed"]["minimum"] = 0;
    props["threads"]["minimum"] = 1;
    props["paths"]["minimum"] = 1;
    props["dt"]["exclusiveMinimum"] = 0;
    props["grid"]["minimum"] = 4;
    props["tolerance_scale"]["exclusiveMinimum"] = 0;
    return json{{"$schema", "https://json-schema.org/draft/2020-12/schema"},
                {"title", "kappa run configuration"},
                {"type", "object"},
                {"additionalProperties", false},
                {"properties", props},
                {"$defs", {{"point", point_def}, {"domain", domain_def}, {"field", field_def}}}};
  }();
  return schema;
}

RunConfig parse_config(const json& j) {
  std::set<std::string> keys;
  for (const auto& [k, v] : config_schema()["properties"].items()) keys.insert(k);
  allow_only(j, keys, "config");

  RunConfig c;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("config: 'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    c.threads = integer(j, "threads", "config", 1);
    if (*c.threads < 1) throw ConfigError("config: 'threads' must be at least 1");
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("config: 'out' must be a string");
    c.out = j["out"].get<std::string>();
  }
  if (j.contains("format")) {
    if (!j["format"].is_string()) throw ConfigError("config: 'format' must be a string");
    c.format = j["format"].get<std::string>();
    if (c.format != "csv" && c.format != "json") throw ConfigError("config: 'format' must be csv or json");
  }
  if (j.contains("paths")) {
    const int p = integer(j, "paths", "config", 0);
    if (p < 1) throw ConfigError("config: 'paths' must be at least 1");
    c.paths = static_cast<size_t>(p);
  }
  if (j.contains("dt")) {
    c.dt = number(j, "dt", "config");
    if (!(*c.dt > 0.0)) throw ConfigError("config: 'dt' must be positive");
  }
  if (j.contains("grid")) {
    c.grid = integer(j, "grid", "config", 0);
    if (*c.grid < 4) throw ConfigError("config: 'grid' must be at least 4");
  }
  c.tolerance_scale = number(j, "tolerance_scale", "config", 1.0);
  if (!(c.tolerance_scale > 0.0)) throw ConfigError("config: 'tolerance_scale' must be positive");
  if (j.contains("t")) {
    c.t = number(j, "t", "config");
    if (!(*c.t > 0.0)) throw ConfigError("config: 't' must be positive");
  }
  if (j.contains("j")) c.j = integer(j, "j", "config", 0);
  if (j.contains("bump")) {
    if (!j["bump"].is_string()) throw ConfigError("config: 'bump' must be a string");
    c.bump = j["bump"].get<std::string>();
    build_bump(c.bump);
  }
  if (j.contains("x0")) c.x0 = point(j["x0"], "config.x0");
  if (j.contains("from")) c.from = point(j["from"], "config.from");
  if (j.contains("to")) c.to = point(j["to"], "config.to");

  // Structural checks now, so --dry-run catches them.
  std::optional<Domain> dom;
  if (j.contains("domain")) {
    c.domain = j["domain"];
    dom = build_domain(c.domain);
  }
  for (const auto& name : kFieldNames)
    if (j.contains(name)) {
      c.fields[name] = j[name];
      build_field(j[name], dom);
    }
  return c;
}

json RunConfig::to_json() const {
  json j = {{"seed", seed}, {"format", format}, {"tolerance_scale", tolerance_scale}, {"bump", bump}};
  const auto coords = [](const Point& p) {
    json a = json::array();
    for (int i = 0; i < p.dim(); ++i) a.push_back(p[i]);
    return a;
  };
  if (threads) j["threads"] = *threads;
  if (!out.empty()) j["out"] = out;
  if (paths) j["paths"] = *paths;
  if (dt) j["dt"] = *dt;
  if (grid) j["grid"] = *grid;
  if (!domain.is_null()) j["domain"] = domain;
  for (const auto& [k, v] : fields.items()) j[k] = v;
  if (x0) j["x0"] = coords(*x0);
  if (from) j["from"] = coords(*from);
  if (to) j["to"] = coords(*to);
  if (t) j["t"] = *t;
  if (this->j) j["j"] = *this->j;
  return j;
}

Domain build_domain(const json& spec) {
  const std::string where = "domain";
  allow_only(spec, {"type", "lower", "upper", "center", "radius", "dim", "axis", "level"}, where);
  if (!spec.contains("type") || !spec["type"].is_string()) throw ConfigError("domain: missing 'type'");
  const std::string type = spec["type"].get<std::string>();
  try {
    if (type == "interval") return Domain::interval(number(spec, "lower", where), number(spec, "upper", where));
    if (type == "box") {
      if (!spec.contains("lower") || !spec.contains("upper")) throw ConfigError("domain: box needs lower and upper");
      return Domain::box(point(spec["lower"], "domain.lower"), point(spec["upper"], "domain.upper"));
    }
    if (type == "disc" || type == "ball" || type == "ball_complement") {
      const int dim = integer(spec, "dim", where, 2);
      if (type == "disc" && dim != 2) throw ConfigError("domain: a disc is two-dimensional");
      const Point c = point_or(spec, "center", where, Point::zero(dim));
      const double r = number(spec, "radius", where);
      return type == "ball_complement" ? Domain::ball_complement(c, r) : Domain::ball(c, r);
    }
    if (type == "half_space")
      return Domain::half_space(integer(spec, "dim", where, 1), integer(spec, "axis", where, 0), number(spec, "level", where, 0.0));
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  throw ConfigError("domain: unknown type '" + type + "'");
}

ScalarField build_field(const json& spec, const std::optional<Domain>& domain) {
  if (spec.is_number()) return ScalarField::constant(spec.get<double>());
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    if (name == "zero") return ScalarField::constant(0.0);
    // -log|x|: the cylinder metric, in which circles about 0 are geodesics.
    if (name == "log-annulus") return ScalarField::log_radial(Point{0.0, 0.0}, 1.0, -1.0);
    throw ConfigError("unknown field preset '" + name + "'");
  }
  const std::string where = "field";
  if (!spec.is_object() || !spec.contains("type") || !spec["type"].is_string())
    throw ConfigError("field: expected a number, a preset name or an object with 'type'");
  const std::string type = spec["type"].get<std::string>();
  try {
    if (type == "constant") {
      allow_only(spec, {"type", "value"}, where);
      return ScalarField::constant(number(spec, "value", where));
    }
    if (type == "affine") {
      allow_only(spec, {"type", "a", "b"}, where);
      if (!spec.contains("a")) throw ConfigError("field: affine needs 'a'");
      return ScalarField::affine(point(spec["a"], "field.a"), number(spec, "b", where, 0.0));
    }
    if (type == "sine" || type == "cosine") {
      allow_only(spec, {"type", "amp", "freq", "phase", "axis"}, where);
      const double a = number(spec, "amp", where, 1.0), w = number(spec, "freq", where, 1.0),
                   ph = number(spec, "phase", where, 0.0);
      return ScalarField::along_axis(type == "sine" ? Profile::sine(a, w, ph) : Profile::cosine(a, w, ph),
                                     integer(spec, "axis", where, 0));
    }
    if (type == "polynomial") {
      allow_only(spec, {"type", "coeffs", "axis"}, where);
      if (!spec.contains("coeffs")) throw ConfigError("field: polynomial needs 'coeffs'");
      return ScalarField::along_axis(Profile::polynomial(numbers(spec["coeffs"], "field.coeffs")),
                                     integer(spec, "axis", where, 0));
    }
    if (type == "radial") {
      allow_only(spec, {"type", "coeffs", "center"}, where);
      if (!spec.contains("coeffs") || !spec.contains("center")) throw ConfigError("field: radial needs coeffs and center");
      return ScalarField::radial(Profile::polynomial(numbers(spec["coeffs"], "field.coeffs")),
                                 point(spec["center"], "field.center"));
    }
    if (type == "log_radial") {
      allow_only(spec, {"type", "center", "scale", "coeff"}, where);
      if (!spec.contains("center")) throw ConfigError("field: log_radial needs 'center'");
      return ScalarField::log_radial(point(spec["center"], "field.center"), number(spec, "scale", where, 1.0),
                                     number(spec, "coeff", where, 1.0));
    }
    if (type == "signed_distance" || type == "convexification") {
      allow_only(spec, type == "signed_distance" ? std::set<std::string>{"type"} : std::set<std::string>{"type", "eps"},
                 where);
      if (!domain) throw ConfigError("field: " + type + " needs a domain");
      if (type == "signed_distance") return ScalarField::signed_distance(*domain);
      return convexification_weight(*domain, boundary_curvature_bound(*domain), number(spec, "eps", where));
    }
    if (type == "sum") {
      allow_only(spec, {"type", "terms"}, where);
      if (!spec.contains("terms") || !spec["terms"].is_array() || spec["terms"].empty())
        throw ConfigError("field: sum needs a nonempty 'terms' array");
      ScalarField s = build_field(spec["terms"][0], domain);
      for (size_t i = 1; i < spec["terms"].size(); ++i) s = s + build_field(spec["terms"][i], domain);
      return s;
    }
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
  throw ConfigError("field: unknown type '" + type + "'");
}

Profile build_bump(const std::string& name) {
  if (name == "cos2") return Profile::cos2_bump();
  if (name == "poly") return Profile::poly_bump();
  throw ConfigError("unknown bump '" + name + "' (cos2 or poly)");
}

}  // namespace kappa::cli
