#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "registry.hpp"

namespace proxipoint {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Deterministic serialization: sorted keys (nlohmann objects are ordered
// maps), fixed 17-significant-digit floats, 2-space indentation. Reports
// rendered by this writer are byte-identical across runs with the same seed.
// ---------------------------------------------------------------------------

namespace detail {

inline void dump_deterministic(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + json(it.key()).dump() + ": ";
        dump_deterministic(it.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_deterministic(v, out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      double v = j.get<double>();
      if (std::isfinite(v))
        out += format_sig17(v);
      else
        out += "null";
      return;
    }
    default: out += j.dump(); return;
  }
}

}  // namespace detail

inline std::string report_to_string(const json& j) {
  std::string out;
  detail::dump_deterministic(j, out, 0);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Report blocks
// ---------------------------------------------------------------------------

inline json class_report_to_json(const ClassReport& rep) {
  json j;
  j["verdict"] = class_verdict_name(rep.verdict);
  j["k_hat"] = rep.k_hat ? json(*rep.k_hat) : json(nullptr);
  j["alpha_hat"] = rep.alpha_hat ? json(*rep.alpha_hat) : json(nullptr);
  j["samples_checked"] = rep.samples_checked;
  j["domain_bound"] = rep.domain_bound;
  json ws = json::array();
  for (const auto& w : rep.witnesses) {
    json e;
    e["property"] = w.property;
    e["r"] = w.r;
    e["s"] = w.s;
    e["t"] = w.t;
    e["t1"] = w.t1;
    e["lhs"] = w.lhs;
    e["rhs"] = w.rhs;
    ws.push_back(std::move(e));
  }
  j["witnesses"] = std::move(ws);
  return j;
}

inline json cert_report_to_json(const CertReport& rep) {
  json j;
  j["verdict"] = rep.violated ? "violated" : "no_violation";
  j["quadruples_checked"] = rep.quadruples_checked;
  json ws = json::array();
  for (const auto& w : rep.witnesses) {
    json e;
    e["u1"] = w.u1;
    e["u2"] = w.u2;
    e["x1"] = w.x1;
    e["x2"] = w.x2;
    e["lhs"] = w.lhs;
    e["rhs"] = w.rhs;
    e["gamma"] = w.gamma ? json(*w.gamma) : json(nullptr);
    ws.push_back(std::move(e));
  }
  j["witnesses"] = std::move(ws);
  return j;
}

inline json pair_to_json(const ProximalPair& pair) {
  json j;
  j["dist"] = pair.dist;
  j["method"] = pair.certificate.method();
  j["witness_g"] = pair.certificate.witness_g;
  j["witness_h"] = pair.certificate.witness_h;
  j["g0_count"] = pair.g0.size();
  j["h0_count"] = pair.h0.size();
  j["resolution"] = pair.resolution;
  return j;
}

inline json trace_to_json(const IterationTrace& trace) {
  json j;
  json its = json::array();
  for (const auto& p : trace.iterates) its.push_back(p);
  j["iterates"] = std::move(its);
  j["steps"] = trace.steps;
  j["image_steps"] = trace.image_steps;
  j["residuals"] = trace.residuals;
  return j;
}

inline json solve_result_to_json(const SolveResult& out) {
  json j;
  j["point"] = out.point;
  j["residual"] = out.residual;
  j["iterations"] = out.iterations;
  j["rate"] = out.rate ? json(*out.rate) : json(nullptr);
  json u;
  u["kind"] = uniqueness_kind_name(out.uniqueness.kind);
  json reps = json::array();
  for (const auto& p : out.uniqueness.representatives) reps.push_back(p);
  u["representatives"] = std::move(reps);
  j["uniqueness"] = std::move(u);
  j["trace"] = trace_to_json(out.trace);
  return j;
}

inline json nested_family_to_json(const NestedFamily& fam) {
  json j;
  j["alpha"] = fam.alpha ? json(*fam.alpha) : json(nullptr);
  j["resolution"] = fam.resolution;
  json levels = json::array();
  for (const auto& level : fam.levels) {
    json e;
    e["p"] = level.p;
    e["member_count"] = level.members.size();
    e["diameter"] = level.diameter;
    e["diameter_bound"] = level.diameter_bound ? json(*level.diameter_bound) : json(nullptr);
    e["bound_ok"] = level.bound_ok;
    levels.push_back(std::move(e));
  }
  j["levels"] = std::move(levels);
  return j;
}

// ---------------------------------------------------------------------------
// Trace persistence
// ---------------------------------------------------------------------------

/// CSV columns: n,<coords...>,step,residual. The step column is the distance
/// to the next iterate and stays empty on the last row. JSON mirrors the
/// trace arrays. Floats carry 17 significant digits either way.
inline void emit_trace(const IterationTrace& trace, TraceFormat format,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open trace path '" + path + "'");
  if (format == TraceFormat::csv) {
    int dim = trace.metric.dim;
    out << "n";
    if (dim == 1) {
      out << ",x";
    } else if (dim == 2) {
      out << ",x,y";
    } else {
      for (int i = 0; i < dim; ++i) out << ",c" << i;
    }
    out << ",step,residual\n";
    for (std::size_t n = 0; n < trace.iterates.size(); ++n) {
      out << n;
      for (double c : trace.iterates[n]) out << "," << format_sig17(c);
      out << ",";
      if (n < trace.steps.size()) out << format_sig17(trace.steps[n]);
      out << "," << format_sig17(trace.residuals[n]) << "\n";
    }
  } else {
    out << report_to_string(trace_to_json(trace));
  }
  out.flush();
  if (!out) fail(errc::io_error, "failed writing trace to '" + path + "'");
}

// ---------------------------------------------------------------------------
// Pipeline: classify -> pair -> certify -> solve -> uniqueness
// ---------------------------------------------------------------------------

struct RunOptions {
  std::uint64_t seed = kDefaultSeed;
  long quadruples = 10000;
  long class_samples = 100000;
  std::optional<SolveScheme> scheme_override;
};

struct RunOutcome {
  json report;
  ClassReport class_report;
  ProximalPair pair;
  CertReport cert;
  SolveResult solve;
  std::optional<NestedFamily> family;
  bool class_failed = false;
  bool cert_violated = false;
  bool mismatch = false;  // run-example expectation check
};

inline RunOutcome run_instance(const InstanceConfig& cfg, const RunOptions& opt = {}) {
  const ProximalInstance& inst = cfg.instance;
  RunOutcome out;

  out.class_report = check_class(inst.relation, inst.relation.declared_class, 10.0,
                                 opt.class_samples, 1e-9, 1e-6, opt.seed);
  out.class_failed = out.class_report.verdict == ClassVerdict::fail;

  out.pair = compute_proximal_pair(inst);
  out.cert = certify_contraction(inst, out.pair, opt.quadruples, opt.seed);
  out.cert_violated = out.cert.violated;

  SolveScheme scheme = opt.scheme_override.value_or(cfg.solver.scheme);
  if (scheme == SolveScheme::strong) {
    auto [solved, family] = solve_strong(inst, cfg.solver.p_max, &out.class_report);
    out.solve = std::move(solved);
    out.family = std::move(family);
  } else {
    if (!cfg.solver.x0)
      fail(errc::schema_error, "solver.x0 is required for the first/second schemes");
    out.solve = scheme == SolveScheme::first
                    ? solve_first_kind(inst, *cfg.solver.x0, cfg.solver.max_iter, &out.pair)
                    : solve_second_kind(inst, *cfg.solver.x0, cfg.solver.max_iter, &out.pair);
  }

  if (!cfg.output.trace_path.empty())
    emit_trace(out.solve.trace, cfg.output.format, cfg.output.trace_path);

  json rep;
  rep["version"] = kToolVersion;
  rep["seed"] = opt.seed;
  rep["scheme"] = solve_scheme_name(scheme);
  rep["instance"] = instance_config_to_json(cfg);
  rep["class_report"] = class_report_to_json(out.class_report);
  rep["distance"] = pair_to_json(out.pair);
  rep["certification"] = cert_report_to_json(out.cert);
  rep["solve"] = solve_result_to_json(out.solve);
  if (out.family) rep["nested_family"] = nested_family_to_json(*out.family);
  out.report = std::move(rep);
  return out;
}

/// Runs a registry fixture and grades the outcome against its expected
/// points (all coordinates within tol_residual).
inline RunOutcome run_example(const std::string& name, const RunOptions& opt = {}) {
  const ExampleFixture& fx = find_example(name);
  InstanceConfig cfg = parse_instance_config(fx.config_json);
  RunOutcome out = run_instance(cfg, opt);

  double tol = cfg.instance.tol.residual;
  auto close = [tol](const Point& a, const Point& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
  };
  bool point_ok = false;
  for (const auto& exp : fx.expected_points) point_ok |= close(out.solve.point, exp);
  bool multiplicity_ok = true;
  if (fx.expect_multiple) {
    const auto& reps = out.solve.uniqueness.representatives;
    multiplicity_ok = out.solve.uniqueness.kind == UniquenessScan::Kind::multiple &&
                      reps.size() == fx.expected_points.size();
    if (multiplicity_ok)
      for (std::size_t i = 0; i < reps.size(); ++i)
        multiplicity_ok &= close(reps[i], fx.expected_points[i]);
  }
  out.mismatch = !(point_ok && multiplicity_ok);

  json ex;
  ex["name"] = fx.name;
  json exp = json::array();
  for (const auto& p : fx.expected_points) exp.push_back(p);
  ex["expected_points"] = std::move(exp);
  ex["expect_multiple"] = fx.expect_multiple;
  ex["match"] = !out.mismatch;
  ex["notes"] = fx.notes;
  out.report["example"] = std::move(ex);
  return out;
}

}  // namespace proxipoint
