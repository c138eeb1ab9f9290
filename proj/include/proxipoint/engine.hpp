#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "geometry.hpp"
#include "relations.hpp"
#include "rng.hpp"

namespace proxipoint {

struct Tolerances {
  double feas = 1e-9;      // proximal-equation feasibility
  double residual = 1e-6;  // best-proximity residual target
  double cert = 1e-9;      // certifier slack
  double step = 1e-9;      // iteration termination
};

enum class ContractionType { first, second, strong };

inline const char* contraction_type_name(ContractionType t) {
  switch (t) {
    case ContractionType::first: return "first";
    case ContractionType::second: return "second";
    case ContractionType::strong: return "strong";
  }
  return "?";
}

/// One solve/certify problem: the space, the two regions, the map S : G -> H,
/// the relation f with its declared class, and tolerances.
struct ProximalInstance {
  Metric metric;
  Region G = Region::interval(0, 1);
  Region H = Region::interval(0, 1);
  MappingSpec map;
  RelationExpr relation;
  ContractionType contraction_type = ContractionType::first;
  Tolerances tol;
  double start_resolution = 1.0 / 16;
  int max_halvings = 20;  // grid refinement budget for the proximal pair
};

inline Point apply_map(const ProximalInstance& inst, const Point& p) {
  return eval_map(inst.map, p);
}

/// Structural checks shared by the loader and the solvers: consistent
/// dimensions, guards covering G, and S(sampled G) landing in H.
inline void validate_instance(const ProximalInstance& inst) {
  if (inst.G.dim() != inst.metric.dim || inst.H.dim() != inst.metric.dim)
    fail(errc::schema_error, "region dimensions disagree with the metric dimension");
  if (inst.map.out_dim != inst.metric.dim)
    fail(errc::schema_error, "map output dimension " + std::to_string(inst.map.out_dim) +
                                 " does not match space dimension " +
                                 std::to_string(inst.metric.dim));
  if (inst.map.arity > inst.metric.dim)
    fail(errc::schema_error, "map uses more variables than the space has coordinates");
  auto samples = region_sample(inst.G, inst.start_resolution);
  for (const auto& x : samples) {
    Point y;
    try {
      y = apply_map(inst, x);
    } catch (const Error& e) {
      if (e.code() == errc::guard_miss)
        fail(errc::schema_error, "map guards do not cover G (miss at a sampled point)");
      throw;
    }
    if (!region_contains(inst.H, y, std::max(inst.tol.feas, 1e-9), inst.metric))
      fail(errc::schema_error, "S maps a sampled point of G outside H");
  }
}

// ---------------------------------------------------------------------------
// Proximal pair: dist(G, H) with the distance-realizing subsets
// ---------------------------------------------------------------------------

struct ProximalPair {
  double dist = 0.0;
  DistanceCertificate certificate;
  std::vector<Point> g0, h0;  // grid members realizing dist against the other set
  double resolution = 0.0;
};

inline ProximalPair compute_proximal_pair(const ProximalInstance& inst) {
  ProximalPair pair;
  pair.certificate = distance_between_regions(inst.G, inst.H, inst.metric);
  pair.dist = pair.certificate.value;
  double res = inst.start_resolution;
  for (int halving = 0;; ++halving) {
    auto gs = region_sample(inst.G, res);
    auto hs = region_sample(inst.H, res);
    pair.g0.clear();
    pair.h0.clear();
    for (const auto& g : gs)
      if (region_distance(inst.H, g, inst.metric) <= pair.dist + inst.tol.feas)
        pair.g0.push_back(g);
    for (const auto& h : hs)
      if (region_distance(inst.G, h, inst.metric) <= pair.dist + inst.tol.feas)
        pair.h0.push_back(h);
    if (!pair.g0.empty() && !pair.h0.empty()) {
      pair.resolution = res;
      return pair;
    }
    if (halving >= inst.max_halvings) break;
    res /= 2;
  }
  fail(errc::empty_proximal_set,
       "no sampled point realizes dist(G, H) = " + format_sig17(pair.dist) +
           " within tolerance at the resolution floor");
}

// ---------------------------------------------------------------------------
// Proximal step: solve d(u, y) = dist over G
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<ScoredPoint> enumerate_sphere_solutions(const ProximalInstance& inst,
                                                           double dist, const Point& y,
                                                           int keep,
                                                           const std::vector<Point>& seeds) {
  MinimizeOptions opt;
  opt.start_resolution = inst.start_resolution;
  opt.max_halvings = 48;
  opt.keep = keep;
  opt.stop_below = 0.0;
  auto phi = [&](const Point& u) {
    return std::abs(metric_eval(inst.metric, u, y) - dist);
  };
  auto cands = refine_minimize(inst.G, phi, opt, seeds);
  std::vector<ScoredPoint> feasible;
  for (auto& c : cands)
    if (c.value <= inst.tol.feas) feasible.push_back(std::move(c));
  return feasible;
}

}  // namespace detail

/// Finds u in G with d(u, y) = dist within tol_feas. Ties go to (1) the
/// smaller deviation, (2) the point nearest the previous iterate, (3) the
/// lexicographically smallest coordinates. Raises NoFeasiblePoint when the
/// equation has no solution in G: the point y is not proximally reachable,
/// i.e. the hypothesis that S(G0) stays inside H0 fails there.
inline Point proximal_step(const ProximalInstance& inst, const ProximalPair& pair,
                           const Point& y, const Point* prev = nullptr) {
  if (!region_contains(inst.H, y, inst.tol.feas, inst.metric))
    fail(errc::no_feasible_point, "target point lies outside H");
  double gap = region_sphere_gap(inst.G, y, pair.dist, inst.metric);
  if (gap > inst.tol.feas)
    fail(errc::no_feasible_point,
         "min |d(u, y) - dist| over G is " + format_sig17(gap) +
             " > tol_feas; y is not in H0");
  std::vector<Point> seeds;
  if (prev) seeds.push_back(*prev);
  auto feasible = detail::enumerate_sphere_solutions(inst, pair.dist, y, 16, seeds);
  if (feasible.empty())
    fail(errc::no_feasible_point,
         "refinement could not reach the proximal equation within tol_feas");
  std::stable_sort(feasible.begin(), feasible.end(),
                   [&](const ScoredPoint& a, const ScoredPoint& b) {
                     if (a.value != b.value) return a.value < b.value;
                     if (prev) {
                       double da = metric_eval(inst.metric, a.point, *prev);
                       double db = metric_eval(inst.metric, b.point, *prev);
                       if (da != db) return da < db;
                     }
                     return lex_less(a.point, b.point);
                   });
  return feasible.front().point;
}

// ---------------------------------------------------------------------------
// Contraction certifier
// ---------------------------------------------------------------------------

struct CertWitness {
  Point u1, u2, x1, x2;
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<double> gamma;
};

struct CertReport {
  bool violated = false;
  std::vector<CertWitness> witnesses;  // first <= 10 violations
  long quadruples_checked = 0;
};

namespace detail {

constexpr std::size_t kCertPoolCap = 256;
constexpr std::size_t kCertEnumCap = 64;
constexpr std::size_t kCertMaxWitnesses = 10;
constexpr int kGammaSweep = 32;

/// Deterministic subsample without replacement, result re-sorted.
inline void cap_points(std::vector<Point>& pts, std::size_t cap, Rng& rng) {
  if (pts.size() <= cap) return;
  for (std::size_t i = 0; i < cap; ++i) {
    std::size_t j = i + rng.index(pts.size() - i);
    std::swap(pts[i], pts[j]);
  }
  pts.resize(cap);
  std::sort(pts.begin(), pts.end(), lex_less);
}

inline double relation_apply(const ProximalInstance& inst, double a, double b, double c) {
  return relation_eval_checked(inst.relation, a, b, c);
}

inline CertReport certify_equality_types(const ProximalInstance& inst,
                                         const ProximalPair& pair, long n_quadruples,
                                         std::uint64_t seed) {
  CertReport rep;
  Rng rng(seed);

  // x pool: sampled points of G whose image admits a proximal solution
  std::vector<Point> pool;
  double res = inst.start_resolution;
  for (int attempt = 0; attempt <= 6 && pool.empty(); ++attempt, res /= 2) {
    for (const auto& x : region_sample(inst.G, res)) {
      Point y = apply_map(inst, x);
      if (region_sphere_gap(inst.G, y, pair.dist, inst.metric) <= inst.tol.feas)
        pool.push_back(x);
    }
  }
  if (pool.empty()) return rep;  // premise never satisfiable: vacuously no violation
  cap_points(pool, kCertPoolCap, rng);

  std::vector<Point> images(pool.size());
  std::vector<std::vector<Point>> solutions(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    images[i] = apply_map(inst, pool[i]);
    auto feas = enumerate_sphere_solutions(inst, pair.dist, images[i],
                                           static_cast<int>(kCertEnumCap), {});
    for (auto& sp : feas) solutions[i].push_back(std::move(sp.point));
  }
  // drop pool entries whose enumeration came back empty
  for (std::size_t i = pool.size(); i-- > 0;) {
    if (solutions[i].empty()) {
      pool.erase(pool.begin() + static_cast<long>(i));
      images.erase(images.begin() + static_cast<long>(i));
      solutions.erase(solutions.begin() + static_cast<long>(i));
    }
  }
  if (pool.empty()) return rep;

  const bool second = inst.contraction_type == ContractionType::second;
  const bool prime = inst.relation.declared_class == RelationClass::Aprime;
  const Metric& m = inst.metric;

  for (long q = 0; q < n_quadruples; ++q) {
    std::size_t i1 = rng.index(pool.size());
    std::size_t i2 = rng.index(pool.size());
    const Point& x1 = pool[i1];
    const Point& x2 = pool[i2];
    const Point& u1 = solutions[i1][rng.index(solutions[i1].size())];
    const Point& u2 = solutions[i2][rng.index(solutions[i2].size())];
    ++rep.quadruples_checked;

    double lhs, rhs;
    if (!second) {
      lhs = metric_eval(m, u1, u2);
      rhs = prime ? relation_apply(inst, metric_eval(m, x1, x2), metric_eval(m, u1, x2),
                                   metric_eval(m, u2, x1))
                  : relation_apply(inst, metric_eval(m, x1, x2), metric_eval(m, u1, x1),
                                   metric_eval(m, u2, x2));
    } else {
      Point su1 = apply_map(inst, u1);
      Point su2 = apply_map(inst, u2);
      const Point& sx1 = images[i1];
      const Point& sx2 = images[i2];
      lhs = metric_eval(m, su1, su2);
      rhs = prime ? relation_apply(inst, metric_eval(m, sx1, sx2), metric_eval(m, su1, sx2),
                                   metric_eval(m, su2, sx1))
                  : relation_apply(inst, metric_eval(m, sx1, sx2), metric_eval(m, su1, sx1),
                                   metric_eval(m, su2, sx2));
    }
    if (lhs > rhs + inst.tol.cert) {
      rep.violated = true;
      rep.witnesses.push_back({u1, u2, x1, x2, lhs, rhs, std::nullopt});
      if (rep.witnesses.size() >= kCertMaxWitnesses) break;
    }
  }
  return rep;
}

inline CertReport certify_strong(const ProximalInstance& inst, const ProximalPair& pair,
                                 long n_quadruples, std::uint64_t seed) {
  CertReport rep;
  Rng rng(seed);
  const Metric& m = inst.metric;
  const bool prime = inst.relation.declared_class == RelationClass::Aprime;
  auto xs_all = region_sample(inst.G, inst.start_resolution);
  long per_gamma = (n_quadruples + kGammaSweep - 1) / kGammaSweep;

  for (int k = 0; k < kGammaSweep; ++k) {
    double gamma = 1.0 + static_cast<double>(k) / kGammaSweep;
    double cap = gamma * pair.dist + inst.tol.feas;

    std::vector<Point> pool;
    std::vector<Point> images;
    for (const auto& x : xs_all) {
      Point y = apply_map(inst, x);
      if (region_distance(inst.G, y, m) <= cap) pool.push_back(x);
    }
    if (pool.empty()) continue;
    cap_points(pool, kCertEnumCap, rng);
    std::vector<std::vector<Point>> admitted(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      Point y = apply_map(inst, pool[i]);
      images.push_back(y);
      for (const auto& u : xs_all)
        if (metric_eval(m, u, y) <= cap) admitted[i].push_back(u);
      cap_points(admitted[i], kCertEnumCap, rng);
    }

    for (long q = 0; q < per_gamma; ++q) {
      std::size_t i1 = rng.index(pool.size());
      std::size_t i2 = rng.index(pool.size());
      if (admitted[i1].empty() || admitted[i2].empty()) continue;
      const Point& x1 = pool[i1];
      const Point& x2 = pool[i2];
      const Point& u1 = admitted[i1][rng.index(admitted[i1].size())];
      const Point& u2 = admitted[i2][rng.index(admitted[i2].size())];
      ++rep.quadruples_checked;
      double lhs = metric_eval(m, u1, u2);
      double base = prime ? relation_apply(inst, metric_eval(m, x1, x2),
                                           metric_eval(m, u1, x2), metric_eval(m, u2, x1))
                          : relation_apply(inst, metric_eval(m, x1, x2),
                                           metric_eval(m, u1, x1), metric_eval(m, u2, x2));
      double rhs = base + (gamma - 1.0) * pair.dist;
      if (lhs > rhs + inst.tol.cert) {
        rep.violated = true;
        rep.witnesses.push_back({u1, u2, x1, x2, lhs, rhs, gamma});
        if (rep.witnesses.size() >= kCertMaxWitnesses) return rep;
      }
    }
  }
  return rep;
}

}  // namespace detail

/// Falsifier for the declared contraction definition. Samples quadruples
/// (u1, u2, x1, x2) satisfying the defining constraint of the instance's
/// contraction type (equality of the proximal distances for first/second
/// type; the gamma-relaxed inequality, swept over 32 values of gamma in
/// [1, 2), for the strong type) and checks the contraction inequality with
/// slack tol_cert. "No violation" is a coverage statement, not a proof.
inline CertReport certify_contraction(const ProximalInstance& inst, const ProximalPair& pair,
                                      long n_quadruples = 10000,
                                      std::uint64_t seed = kDefaultSeed) {
  if (inst.contraction_type == ContractionType::strong)
    return detail::certify_strong(inst, pair, n_quadruples, seed);
  return detail::certify_equality_types(inst, pair, n_quadruples, seed);
}

}  // namespace proxipoint
