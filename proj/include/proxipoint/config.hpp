#pragma once

#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "engine.hpp"
#include "solver.hpp"

namespace proxipoint {

using json = nlohmann::json;

enum class SolveScheme { first, second, strong };

inline const char* solve_scheme_name(SolveScheme s) {
  switch (s) {
    case SolveScheme::first: return "first";
    case SolveScheme::second: return "second";
    case SolveScheme::strong: return "strong";
  }
  return "?";
}

enum class TraceFormat { csv, json_format };

struct SolverConfig {
  SolveScheme scheme = SolveScheme::first;
  std::optional<Point> x0;
  int max_iter = 10000;
  int p_max = 64;
};

struct OutputConfig {
  std::string trace_path;  // empty: no trace emitted
  TraceFormat format = TraceFormat::csv;
};

struct InstanceConfig {
  ProximalInstance instance;
  SolverConfig solver;
  OutputConfig output;
};

// ---------------------------------------------------------------------------
// Strict JSON -> config parsing (unknown keys rejected)
// ---------------------------------------------------------------------------

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& context) {
  if (!j.is_object()) fail(errc::schema_error, context + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) fail(errc::schema_error, "unknown key '" + it.key() + "' in " + context);
  }
}

inline const json& require_key(const json& j, const char* key, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) fail(errc::schema_error, context + " is missing key '" + key + "'");
  return *it;
}

inline double number_field(const json& j, const std::string& context) {
  if (!j.is_number()) fail(errc::schema_error, context + " must be a number");
  return j.get<double>();
}

inline double bound_field(const json& j, const std::string& context) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    fail(errc::schema_error, context + ": expected a number, \"inf\", or \"-inf\"");
  }
  return number_field(j, context);
}

inline Point point_field(const json& j, const std::string& context) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array() || j.empty())
    fail(errc::schema_error, context + " must be a number or a coordinate array");
  Point p;
  for (const auto& c : j) p.push_back(number_field(c, context));
  return p;
}

}  // namespace detail

inline Region region_from_json(const json& j, const std::string& context) {
  using detail::bound_field;
  using detail::check_keys;
  using detail::number_field;
  using detail::point_field;
  using detail::require_key;
  const std::string shape = require_key(j, "shape", context).get<std::string>();
  Region region = Region::interval(0, 1);
  if (shape == "interval") {
    check_keys(j, {"shape", "lo", "hi", "trunc_radius"}, context);
    region = Region::interval(bound_field(require_key(j, "lo", context), context + ".lo"),
                              bound_field(require_key(j, "hi", context), context + ".hi"));
  } else if (shape == "box") {
    check_keys(j, {"shape", "axes", "trunc_radius"}, context);
    const json& axes = require_key(j, "axes", context);
    if (!axes.is_array() || axes.empty())
      fail(errc::schema_error, context + ".axes must be a nonempty array");
    std::vector<AxisRange> ranges;
    for (const auto& ax : axes) {
      if (!ax.is_array() || ax.size() != 2)
        fail(errc::schema_error, context + ".axes entries must be [lo, hi]");
      ranges.push_back({bound_field(ax[0], context + ".axes"), bound_field(ax[1], context + ".axes")});
    }
    region = Region::box(std::move(ranges));
  } else if (shape == "segment") {
    check_keys(j, {"shape", "a", "b", "trunc_radius"}, context);
    region = Region::segment(point_field(require_key(j, "a", context), context + ".a"),
                             point_field(require_key(j, "b", context), context + ".b"));
  } else if (shape == "finite_set") {
    check_keys(j, {"shape", "points", "trunc_radius"}, context);
    const json& pts = require_key(j, "points", context);
    if (!pts.is_array() || pts.empty())
      fail(errc::schema_error, context + ".points must be a nonempty array");
    std::vector<Point> points;
    for (const auto& p : pts) points.push_back(point_field(p, context + ".points"));
    region = Region::finite_set(std::move(points));
  } else if (shape == "union") {
    check_keys(j, {"shape", "parts", "trunc_radius"}, context);
    const json& parts = require_key(j, "parts", context);
    if (!parts.is_array() || parts.empty())
      fail(errc::schema_error, context + ".parts must be a nonempty array");
    std::vector<Region> sub;
    std::size_t i = 0;
    for (const auto& p : parts)
      sub.push_back(region_from_json(p, context + ".parts[" + std::to_string(i++) + "]"));
    region = Region::union_of(std::move(sub));
  } else {
    fail(errc::schema_error, context + ": unknown shape '" + shape + "'");
  }
  if (auto it = j.find("trunc_radius"); it != j.end()) {
    double r = number_field(*it, context + ".trunc_radius");
    if (r <= 0) fail(errc::schema_error, context + ".trunc_radius must be positive");
    region.trunc_radius = r;
  }
  return region;
}

inline json region_to_json(const Region& r) {
  auto bound = [](double v) -> json {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return v;
  };
  json j;
  switch (r.kind()) {
    case ShapeKind::interval:
      j["shape"] = "interval";
      j["lo"] = bound(r.axes()[0].lo);
      j["hi"] = bound(r.axes()[0].hi);
      break;
    case ShapeKind::box: {
      j["shape"] = "box";
      json axes = json::array();
      for (const auto& ax : r.axes()) axes.push_back({bound(ax.lo), bound(ax.hi)});
      j["axes"] = std::move(axes);
      break;
    }
    case ShapeKind::segment:
      j["shape"] = "segment";
      j["a"] = r.segment_a();
      j["b"] = r.segment_b();
      break;
    case ShapeKind::finite_set: {
      j["shape"] = "finite_set";
      json pts = json::array();
      for (const auto& p : r.points()) pts.push_back(p);
      j["points"] = std::move(pts);
      break;
    }
    case ShapeKind::union_of: {
      j["shape"] = "union";
      json parts = json::array();
      for (const auto& p : r.parts()) parts.push_back(region_to_json(p));
      j["parts"] = std::move(parts);
      break;
    }
  }
  if (r.trunc_radius != 100.0) j["trunc_radius"] = r.trunc_radius;
  return j;
}

inline Metric metric_from_json(const json& j) {
  detail::check_keys(j, {"kind", "dim"}, "metric");
  std::string kind = detail::require_key(j, "kind", "metric").get<std::string>();
  Metric m;
  if (kind == "L1")
    m.kind = MetricKind::l1;
  else if (kind == "L2")
    m.kind = MetricKind::l2;
  else if (kind == "Linf")
    m.kind = MetricKind::linf;
  else
    fail(errc::schema_error, "metric.kind must be L1, L2, or Linf");
  const json& dim = detail::require_key(j, "dim", "metric");
  if (!dim.is_number_integer() || dim.get<int>() < 1)
    fail(errc::schema_error, "metric.dim must be a positive integer");
  m.dim = dim.get<int>();
  return m;
}

inline json metric_to_json(const Metric& m) {
  json j;
  j["kind"] = m.kind == MetricKind::l1 ? "L1" : m.kind == MetricKind::l2 ? "L2" : "Linf";
  j["dim"] = m.dim;
  return j;
}

inline RelationExpr relation_from_json(const json& j) {
  detail::check_keys(j, {"text", "name", "params", "class"}, "relation");
  RelationExpr rel;
  if (j.contains("text")) {
    if (j.contains("name") || j.contains("params"))
      fail(errc::schema_error, "relation: give either text or name+params, not both");
    rel = parse_relation(j["text"].get<std::string>());
  } else if (j.contains("name")) {
    std::map<std::string, double> params;
    if (j.contains("params")) {
      if (!j["params"].is_object()) fail(errc::schema_error, "relation.params must be an object");
      for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
        params[it.key()] = detail::number_field(it.value(), "relation.params." + it.key());
    }
    rel = catalog_relation(j["name"].get<std::string>(), params);
  } else {
    fail(errc::schema_error, "relation needs either 'text' or 'name'");
  }
  std::string cls = detail::require_key(j, "class", "relation").get<std::string>();
  if (cls == "A")
    rel.declared_class = RelationClass::A;
  else if (cls == "Aprime")
    rel.declared_class = RelationClass::Aprime;
  else
    fail(errc::schema_error, "relation.class must be A or Aprime");
  return rel;
}

inline json relation_to_json(const RelationExpr& rel) {
  json j;
  j["text"] = rel.source.empty() ? print_expr(rel.body) : rel.source;
  j["class"] = relation_class_name(rel.declared_class);
  return j;
}

inline InstanceConfig instance_config_from_json(const json& j) {
  detail::check_keys(j,
                     {"metric", "G", "H", "map", "relation", "contraction_type", "solver",
                      "output"},
                     "config");
  InstanceConfig cfg;
  ProximalInstance& inst = cfg.instance;
  inst.metric = metric_from_json(detail::require_key(j, "metric", "config"));
  inst.G = region_from_json(detail::require_key(j, "G", "config"), "G");
  inst.H = region_from_json(detail::require_key(j, "H", "config"), "H");
  inst.map = parse_map(detail::require_key(j, "map", "config").get<std::string>());
  inst.relation = relation_from_json(detail::require_key(j, "relation", "config"));

  std::string type = detail::require_key(j, "contraction_type", "config").get<std::string>();
  if (type == "first")
    inst.contraction_type = ContractionType::first;
  else if (type == "second")
    inst.contraction_type = ContractionType::second;
  else if (type == "strong")
    inst.contraction_type = ContractionType::strong;
  else
    fail(errc::schema_error, "contraction_type must be first, second, or strong");

  // default scheme follows the declared contraction type
  cfg.solver.scheme = inst.contraction_type == ContractionType::strong ? SolveScheme::strong
                      : inst.contraction_type == ContractionType::second
                          ? SolveScheme::second
                          : SolveScheme::first;

  if (auto it = j.find("solver"); it != j.end()) {
    detail::check_keys(*it, {"scheme", "x0", "max_iter", "p_max", "tolerances"}, "solver");
    if (auto s = it->find("scheme"); s != it->end()) {
      std::string scheme = s->get<std::string>();
      if (scheme == "first")
        cfg.solver.scheme = SolveScheme::first;
      else if (scheme == "second")
        cfg.solver.scheme = SolveScheme::second;
      else if (scheme == "strong")
        cfg.solver.scheme = SolveScheme::strong;
      else
        fail(errc::schema_error, "solver.scheme must be first, second, or strong");
    }
    if (auto x = it->find("x0"); x != it->end())
      cfg.solver.x0 = detail::point_field(*x, "solver.x0");
    if (auto m = it->find("max_iter"); m != it->end()) {
      if (!m->is_number_integer() || m->get<int>() < 1)
        fail(errc::schema_error, "solver.max_iter must be a positive integer");
      cfg.solver.max_iter = m->get<int>();
    }
    if (auto p = it->find("p_max"); p != it->end()) {
      if (!p->is_number_integer() || p->get<int>() < 1)
        fail(errc::schema_error, "solver.p_max must be a positive integer");
      cfg.solver.p_max = p->get<int>();
    }
    if (auto t = it->find("tolerances"); t != it->end()) {
      detail::check_keys(*t, {"feas", "residual", "cert", "step"}, "tolerances");
      if (auto v = t->find("feas"); v != t->end())
        inst.tol.feas = detail::number_field(*v, "tolerances.feas");
      if (auto v = t->find("residual"); v != t->end())
        inst.tol.residual = detail::number_field(*v, "tolerances.residual");
      if (auto v = t->find("cert"); v != t->end())
        inst.tol.cert = detail::number_field(*v, "tolerances.cert");
      if (auto v = t->find("step"); v != t->end())
        inst.tol.step = detail::number_field(*v, "tolerances.step");
    }
  }

  if (auto it = j.find("output"); it != j.end()) {
    detail::check_keys(*it, {"trace_path", "format"}, "output");
    if (auto p = it->find("trace_path"); p != it->end())
      cfg.output.trace_path = p->get<std::string>();
    if (auto f = it->find("format"); f != it->end()) {
      std::string fmt = f->get<std::string>();
      if (fmt == "csv")
        cfg.output.format = TraceFormat::csv;
      else if (fmt == "json")
        cfg.output.format = TraceFormat::json_format;
      else
        fail(errc::schema_error, "output.format must be csv or json");
    }
  }

  validate_instance(inst);
  return cfg;
}

inline json instance_config_to_json(const InstanceConfig& cfg) {
  json j;
  j["metric"] = metric_to_json(cfg.instance.metric);
  j["G"] = region_to_json(cfg.instance.G);
  j["H"] = region_to_json(cfg.instance.H);
  j["map"] = print_map(cfg.instance.map);
  j["relation"] = relation_to_json(cfg.instance.relation);
  j["contraction_type"] = contraction_type_name(cfg.instance.contraction_type);
  json solver;
  solver["scheme"] = solve_scheme_name(cfg.solver.scheme);
  if (cfg.solver.x0) solver["x0"] = *cfg.solver.x0;
  solver["max_iter"] = cfg.solver.max_iter;
  solver["p_max"] = cfg.solver.p_max;
  json tol;
  tol["feas"] = cfg.instance.tol.feas;
  tol["residual"] = cfg.instance.tol.residual;
  tol["cert"] = cfg.instance.tol.cert;
  tol["step"] = cfg.instance.tol.step;
  solver["tolerances"] = std::move(tol);
  j["solver"] = std::move(solver);
  if (!cfg.output.trace_path.empty()) {
    json out;
    out["trace_path"] = cfg.output.trace_path;
    out["format"] = cfg.output.format == TraceFormat::csv ? "csv" : "json";
    j["output"] = std::move(out);
  }
  return j;
}

inline InstanceConfig parse_instance_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(errc::schema_error, std::string("config is not valid JSON: ") + e.what());
  }
  return instance_config_from_json(j);
}

/// Loads, schema-validates, and DSL-compiles an instance configuration file.
inline InstanceConfig load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance_config(buf.str());
}

}  // namespace proxipoint
