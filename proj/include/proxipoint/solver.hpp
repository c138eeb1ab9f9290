#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "engine.hpp"

namespace proxipoint {

struct IterationTrace {
  Metric metric;
  std::vector<Point> iterates;
  std::vector<double> steps;        // d(u_n, u_{n+1})
  std::vector<double> image_steps;  // d(S u_n, S u_{n+1}); second kind only
  std::vector<double> residuals;    // |d(u_n, S u_n) - dist| per iterate
};

struct UniquenessScan {
  enum class Kind { unique, multiple, unknown };
  Kind kind = Kind::unknown;
  std::vector<Point> representatives;  // one per residual-minimum cluster
};

inline const char* uniqueness_kind_name(UniquenessScan::Kind k) {
  switch (k) {
    case UniquenessScan::Kind::unique: return "unique";
    case UniquenessScan::Kind::multiple: return "multiple";
    case UniquenessScan::Kind::unknown: return "unknown";
  }
  return "?";
}

struct SolveResult {
  Point point;
  double residual = 0.0;
  int iterations = 0;
  IterationTrace trace;
  std::optional<double> rate;  // geometric step-ratio estimate, when defined
  UniquenessScan uniqueness;
};

struct NestedLevel {
  int p = 1;
  std::vector<Point> members;
  double diameter = 0.0;
  std::optional<double> diameter_bound;  // dist/((1-alpha)p) when alpha is known
  bool bound_ok = true;
};

struct NestedFamily {
  std::vector<NestedLevel> levels;
  double resolution = 0.0;
  std::optional<double> alpha;
};

// ---------------------------------------------------------------------------
// Convergence-rate estimation
// ---------------------------------------------------------------------------

/// Largest step ratio over the tail (last half) of the trace. Also asserts
/// the a-priori geometric bound d(u_n, u_final) <= k^n/(1-k) * steps[0] for
/// every n, which the tail estimate must dominate if the iteration really
/// contracts.
inline double estimate_rate(const IterationTrace& trace) {
  const auto& steps = trace.steps;
  long nonzero = 0;
  for (double s : steps)
    if (s > 0) ++nonzero;
  if (nonzero < 3) fail(errc::too_short, "need at least 3 nonzero steps to estimate a rate");

  std::size_t n_steps = steps.size();
  std::size_t tail_start = n_steps / 2;
  double k = -1.0;
  for (std::size_t n = tail_start; n + 1 < n_steps; ++n)
    if (steps[n] > 0 && steps[n + 1] > 0) k = std::max(k, steps[n + 1] / steps[n]);
  if (k < 0) fail(errc::too_short, "trace tail has no consecutive nonzero steps");
  if (k >= 1.0)
    fail(errc::rate_geq_one, "tail step ratio " + format_sig17(k) + " is not below 1");

  const Point& final_point = trace.iterates.back();
  double base = steps[0] / (1.0 - k);
  double factor = 1.0;
  for (std::size_t n = 0; n < trace.iterates.size(); ++n) {
    double lhs = metric_eval(trace.metric, trace.iterates[n], final_point);
    if (lhs > factor * base + 1e-9)
      fail(errc::rate_geq_one, "a-priori geometric bound violated at iterate " +
                                   std::to_string(n));
    factor *= k;
  }
  return k;
}

// ---------------------------------------------------------------------------
// Uniqueness scan
// ---------------------------------------------------------------------------

/// Scans G for residual-minimum clusters. `unique` when every candidate with
/// residual <= tol_residual collapses into one cluster, `multiple` with one
/// representative per cluster otherwise, `unknown` when near-threshold
/// candidates sit away from every accepted cluster.
inline UniquenessScan check_uniqueness(const ProximalInstance& inst, double dist,
                                       const Point& solved) {
  auto residual = [&](const Point& x) {
    return std::abs(metric_eval(inst.metric, x, apply_map(inst, x)) - dist);
  };
  MinimizeOptions opt;
  opt.start_resolution = inst.start_resolution;
  opt.max_halvings = 48;
  opt.keep = 128;
  opt.stop_below = -1.0;  // refine every surviving basin to the floor
  auto cands = refine_minimize(inst.G, residual, opt, {solved});

  const double cluster_radius = 1e-4;
  UniquenessScan scan;
  for (const auto& c : cands) {
    if (c.value > inst.tol.residual) continue;
    bool merged = false;
    for (const auto& rep : scan.representatives)
      if (linf_between(c.point, rep) <= cluster_radius) {
        merged = true;
        break;
      }
    if (!merged) scan.representatives.push_back(c.point);
  }
  std::sort(scan.representatives.begin(), scan.representatives.end(), lex_less);

  if (scan.representatives.empty()) {
    scan.kind = UniquenessScan::Kind::unknown;
    return scan;
  }
  // near-threshold stragglers away from every cluster leave the verdict open
  for (const auto& c : cands) {
    if (c.value <= inst.tol.residual || c.value > 10 * inst.tol.residual) continue;
    bool near = false;
    for (const auto& rep : scan.representatives)
      if (linf_between(c.point, rep) <= cluster_radius) near = true;
    if (!near) {
      scan.kind = UniquenessScan::Kind::unknown;
      return scan;
    }
  }
  scan.kind = scan.representatives.size() == 1 ? UniquenessScan::Kind::unique
                                               : UniquenessScan::Kind::multiple;
  return scan;
}

// ---------------------------------------------------------------------------
// First-kind solver
// ---------------------------------------------------------------------------

namespace detail {

inline void require_start_proximal(const ProximalInstance& inst, const ProximalPair& pair,
                                   const Point& x0) {
  if (!region_contains(inst.G, x0, inst.tol.feas, inst.metric) ||
      region_distance(inst.H, x0, inst.metric) > pair.dist + inst.tol.feas)
    fail(errc::start_not_proximal, "x0 does not realize dist(G, H) against H");
}

inline std::optional<double> try_estimate_rate(const IterationTrace& trace) {
  try {
    return estimate_rate(trace);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Picard-style iteration from the existence proof: u_{n+1} solves
/// d(u_{n+1}, S u_n) = dist(G, H). Stops when the step length falls below
/// tol_step.
inline SolveResult solve_first_kind(const ProximalInstance& inst, const Point& x0,
                                    int max_iter = 10000,
                                    const ProximalPair* pair_in = nullptr) {
  ProximalPair local_pair;
  if (!pair_in) {
    local_pair = compute_proximal_pair(inst);
    pair_in = &local_pair;
  }
  const ProximalPair& pair = *pair_in;
  detail::require_start_proximal(inst, pair, x0);

  auto residual_at = [&](const Point& u) {
    return std::abs(metric_eval(inst.metric, u, apply_map(inst, u)) - pair.dist);
  };

  SolveResult out;
  IterationTrace& trace = out.trace;
  trace.metric = inst.metric;
  Point u = x0;
  trace.iterates.push_back(u);
  trace.residuals.push_back(residual_at(u));

  bool converged = false;
  int expanding = 0;
  for (int it = 0; it < max_iter; ++it) {
    Point y = apply_map(inst, u);
    Point next = proximal_step(inst, pair, y, &u);
    double step = metric_eval(inst.metric, u, next);
    if (!trace.steps.empty() && trace.steps.back() > 0 && step > trace.steps.back()) {
      if (++expanding >= 10)
        fail(errc::diverging, "step length grew for 10 consecutive iterations");
    } else {
      expanding = 0;
    }
    trace.steps.push_back(step);
    u = std::move(next);
    trace.iterates.push_back(u);
    trace.residuals.push_back(residual_at(u));
    if (step <= inst.tol.step) {
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(errc::max_iter_exceeded, "no convergence after " + std::to_string(max_iter) +
                                      " iterations");

  out.point = u;
  out.residual = trace.residuals.back();
  out.iterations = static_cast<int>(trace.steps.size());
  if (out.residual > inst.tol.residual)
    fail(errc::residual_too_large,
         "converged iterate has residual " + format_sig17(out.residual));
  out.rate = detail::try_estimate_rate(trace);
  out.uniqueness = check_uniqueness(inst, pair.dist, u);
  return out;
}

// ---------------------------------------------------------------------------
// Second-kind solver
// ---------------------------------------------------------------------------

/// Same iteration, but termination watches the image steps d(S v_n, S v_{n+1})
/// and the answer is the trace-tail iterate with the smallest residual (the
/// stand-in for extracting the convergent subsequence, which exists on the
/// sampled, hence compact, regions).
inline SolveResult solve_second_kind(const ProximalInstance& inst, const Point& x0,
                                     int max_iter = 10000,
                                     const ProximalPair* pair_in = nullptr) {
  ProximalPair local_pair;
  if (!pair_in) {
    local_pair = compute_proximal_pair(inst);
    pair_in = &local_pair;
  }
  const ProximalPair& pair = *pair_in;
  detail::require_start_proximal(inst, pair, x0);

  auto residual_at = [&](const Point& u) {
    return std::abs(metric_eval(inst.metric, u, apply_map(inst, u)) - pair.dist);
  };

  SolveResult out;
  IterationTrace& trace = out.trace;
  trace.metric = inst.metric;
  Point v = x0;
  Point image = apply_map(inst, v);
  trace.iterates.push_back(v);
  trace.residuals.push_back(residual_at(v));

  bool converged = false;
  int expanding = 0;
  for (int it = 0; it < max_iter; ++it) {
    Point next = proximal_step(inst, pair, image, &v);
    double step = metric_eval(inst.metric, v, next);
    Point next_image = apply_map(inst, next);
    double image_step = metric_eval(inst.metric, image, next_image);
    if (!trace.image_steps.empty() && trace.image_steps.back() > 0 &&
        image_step > trace.image_steps.back()) {
      if (++expanding >= 10)
        fail(errc::diverging, "image step grew for 10 consecutive iterations");
    } else {
      expanding = 0;
    }
    trace.steps.push_back(step);
    trace.image_steps.push_back(image_step);
    v = std::move(next);
    image = std::move(next_image);
    trace.iterates.push_back(v);
    trace.residuals.push_back(residual_at(v));
    if (image_step <= inst.tol.step) {
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(errc::max_iter_exceeded, "no convergence after " + std::to_string(max_iter) +
                                      " iterations");

  // pick the tail iterate with the smallest residual
  std::size_t tail_start = trace.iterates.size() / 2;
  std::size_t best = tail_start;
  for (std::size_t i = tail_start; i < trace.iterates.size(); ++i)
    if (trace.residuals[i] < trace.residuals[best]) best = i;
  out.point = trace.iterates[best];
  out.residual = trace.residuals[best];
  out.iterations = static_cast<int>(trace.steps.size());
  if (out.residual > inst.tol.residual)
    fail(errc::subsequence_not_found,
         "no tail iterate meets the residual tolerance (best " +
             format_sig17(out.residual) + ")");
  out.rate = detail::try_estimate_rate(trace);
  out.uniqueness = check_uniqueness(inst, pair.dist, out.point);
  return out;
}

// ---------------------------------------------------------------------------
// Strong solver: nested sublevel family
// ---------------------------------------------------------------------------

/// Builds F_p = {x in G : d(x, Sx) <= (1 + 1/p) dist} for p = 1..p_max on one
/// shared grid (so nestedness is exact), checks the diameter bound
/// dist/((1-alpha)p) when alpha is available from the relation classifier,
/// and refines the residual-minimizing member of F_{p_max} into the answer.
inline std::pair<SolveResult, NestedFamily> solve_strong(const ProximalInstance& inst,
                                                         int p_max = 64,
                                                         const ClassReport* cls_in = nullptr) {
  if (p_max < 1) fail(errc::schema_error, "p_max must be >= 1");
  auto cert = distance_between_regions(inst.G, inst.H, inst.metric);
  double dist = cert.value;
  if (dist <= inst.tol.feas)
    fail(errc::dist_zero, "dist(G, H) must be positive for the strong scheme");

  ClassReport cls;
  if (cls_in)
    cls = *cls_in;
  else
    cls = check_class(inst.relation, inst.relation.declared_class);

  auto residual_at = [&](const Point& x) {
    return std::abs(metric_eval(inst.metric, x, apply_map(inst, x)) - dist);
  };

  // resolution fine enough to resolve the narrowest level
  double res = inst.start_resolution;
  double target = dist / (2.0 * p_max);
  int guard = 0;
  while (res > target && guard++ < 30) res /= 2;

  std::vector<Point> samples;
  std::vector<double> values;
  for (int extra = 0;; ++extra) {
    samples = region_sample(inst.G, res);
    values.clear();
    values.reserve(samples.size());
    for (const auto& x : samples) values.push_back(residual_at(x));
    // F_{p_max} nonempty suffices: it is contained in every other level
    double threshold = dist / p_max + inst.tol.feas;
    bool nonempty = false;
    for (double v : values)
      if (v <= threshold) nonempty = true;
    if (nonempty) break;
    if (extra >= 10)
      fail(errc::sequence_missing,
           "no sampled point has d(x, Sx) within (1 + 1/p_max) dist at the floor");
    res /= 2;
  }

  NestedFamily family;
  family.resolution = res;
  family.alpha = cls.alpha_hat;
  for (int p = 1; p <= p_max; ++p) {
    NestedLevel level;
    level.p = p;
    double threshold = dist / p + inst.tol.feas;  // d(x,Sx) - dist <= dist/p
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (values[i] <= threshold) level.members.push_back(samples[i]);
    double diam = 0.0;
    for (std::size_t a = 0; a < level.members.size(); ++a)
      for (std::size_t b = a + 1; b < level.members.size(); ++b)
        diam = std::max(diam, metric_eval(inst.metric, level.members[a], level.members[b]));
    level.diameter = diam;
    if (family.alpha && *family.alpha < 1.0) {
      level.diameter_bound = dist / ((1.0 - *family.alpha) * p);
      level.bound_ok = diam <= *level.diameter_bound + 2 * res + 1e-9 * (1.0 + dist);
    }
    family.levels.push_back(std::move(level));
  }

  // answer: best member of the deepest level, locally refined
  const auto& deepest = family.levels.back().members;
  Point seed = deepest.front();
  for (const auto& x : deepest)
    if (residual_at(x) < residual_at(seed)) seed = x;
  MinimizeOptions opt;
  opt.start_resolution = res;
  opt.max_halvings = 48;
  opt.keep = 4;
  opt.stop_below = 0.0;
  auto refined = refine_minimize(inst.G, residual_at, opt, {seed});

  SolveResult out;
  out.trace.metric = inst.metric;
  for (const auto& level : family.levels) {
    Point best = level.members.front();
    for (const auto& x : level.members)
      if (residual_at(x) < residual_at(best)) best = x;
    if (!out.trace.iterates.empty())
      out.trace.steps.push_back(metric_eval(inst.metric, out.trace.iterates.back(), best));
    out.trace.iterates.push_back(best);
    out.trace.residuals.push_back(residual_at(best));
  }
  out.point = refined.front().point;
  out.residual = refined.front().value;
  if (!out.trace.iterates.empty())
    out.trace.steps.push_back(metric_eval(inst.metric, out.trace.iterates.back(), out.point));
  out.trace.iterates.push_back(out.point);
  out.trace.residuals.push_back(out.residual);
  out.iterations = p_max;
  if (out.residual > inst.tol.residual)
    fail(errc::residual_too_large,
         "refined F_p member has residual " + format_sig17(out.residual));
  out.uniqueness = check_uniqueness(inst, dist, out.point);
  return {std::move(out), std::move(family)};
}

}  // namespace proxipoint
