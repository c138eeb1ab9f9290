#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "numfmt.hpp"
#include "rng.hpp"

namespace proxipoint {

// The two admissibility classes checked here, written for f : R+^3 -> R:
//
//   class A:  (A1) a k in [0,1) exists with: r <= f(s,s,r) or r <= f(r,s,s)
//                  implies r <= k*s;
//             (A2) an alpha in [0,1) exists with f(r,0,0) <= alpha*r.
//
//   class A': (A'1) a k in [0,1) exists with: r <= f(s,0,r+s) implies r <= k*s;
//             (A'2) f is nondecreasing in its third argument;
//             (A'3) r <= f(r,r,r) implies r = 0.
//
// The checks are falsifiers over a sampled domain: "pass" means no violation
// was found and reports the empirical constants, it is not a proof.

struct ClassWitness {
  std::string property;  // which condition failed: "A1", "A2", "A'1", "A'2", "A'3"
  double r = 0, s = 0, t = 0, t1 = 0;
  double lhs = 0, rhs = 0;
};

enum class ClassVerdict { pass, fail, inconclusive };

inline const char* class_verdict_name(ClassVerdict v) {
  switch (v) {
    case ClassVerdict::pass: return "pass";
    case ClassVerdict::fail: return "fail";
    case ClassVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ClassReport {
  ClassVerdict verdict = ClassVerdict::inconclusive;
  std::optional<double> k_hat;      // sup r/s over hypothesis-satisfying samples
  std::optional<double> alpha_hat;  // sup f(r,0,0)/r (class A only)
  std::vector<ClassWitness> witnesses;
  long samples_checked = 0;
  double domain_bound = 0;
};

namespace detail {

constexpr std::size_t kMaxClassWitnesses = 10;

inline double relation_eval_checked(const RelationExpr& f, double r, double s, double t) {
  double v;
  try {
    v = f(r, s, t);
  } catch (const Error& e) {
    fail(errc::eval_error, std::string("relation evaluation failed: ") + e.what());
  }
  if (!std::isfinite(v))
    fail(errc::eval_error, "relation evaluated to a non-finite value at (" +
                               format_shortest(r) + ", " + format_shortest(s) + ", " +
                               format_shortest(t) + ")");
  return v;
}

/// Largest dyadic level whose full grid fits in `budget` samples for the
/// given tuple arity. Level grids are nested, so estimated suprema are
/// monotone in the sample count.
inline int dyadic_level(long budget, int arity) {
  int level = 0;
  for (;;) {
    double side = std::pow(2.0, level + 1) + 1.0;
    double count = std::pow(side, arity);
    if (count > static_cast<double>(budget)) return level;
    ++level;
    if (level > 20) return 20;
  }
}

template <class Fn>
void for_each_pair_sample(double R, long n_samples, std::uint64_t seed, Fn&& fn) {
  int level = dyadic_level(n_samples / 2, 2);
  long side = (1L << level) + 1;
  double denom = static_cast<double>(1L << level);
  long produced = 0;
  for (long i = 0; i < side; ++i)
    for (long j = 0; j < side; ++j) {
      fn(R * (static_cast<double>(i) / denom), R * (static_cast<double>(j) / denom));
      ++produced;
    }
  Rng rng(seed);
  for (; produced < n_samples; ++produced) fn(rng.uniform(0, R), rng.uniform(0, R));
}

}  // namespace detail

/// Samples (r, s) over [0, R_dom]^2 (nested dyadic grid plus a seeded uniform
/// stream) and falsifies the class-A conditions. k_hat and alpha_hat are the
/// suprema observed over satisfying samples.
inline ClassReport check_class_A(const RelationExpr& f, double R_dom = 10.0,
                                 long n_samples = 100000, double tol = 1e-9,
                                 double margin = 1e-6,
                                 std::uint64_t seed = kDefaultSeed) {
  if (n_samples < 1) fail(errc::schema_error, "n_samples must be >= 1");
  if (R_dom <= 0) fail(errc::schema_error, "R_dom must be positive");
  ClassReport rep;
  rep.domain_bound = R_dom;
  bool hypothesis_fired = false;

  auto witness = [&rep](ClassWitness w) {
    if (rep.witnesses.size() < detail::kMaxClassWitnesses)
      rep.witnesses.push_back(std::move(w));
  };

  detail::for_each_pair_sample(R_dom, n_samples, seed, [&](double r, double s) {
    ++rep.samples_checked;
    double f_ssr = detail::relation_eval_checked(f, s, s, r);
    double f_rss = detail::relation_eval_checked(f, r, s, s);
    bool hyp = (r <= f_ssr + tol) || (r <= f_rss + tol);
    if (hyp) {
      hypothesis_fired = true;
      if (s <= tol) {
        // r <= k*s with s ~ 0 forces r ~ 0
        if (r > tol)
          witness({"A1", r, s, 0, 0, r, std::max(f_ssr, f_rss)});
      } else {
        double ratio = r / s;
        if (!rep.k_hat || ratio > *rep.k_hat) rep.k_hat = ratio;
        if (ratio > 1.0 - margin) witness({"A1", r, s, 0, 0, r, s});
      }
    }
    if (r > tol) {
      double a = detail::relation_eval_checked(f, r, 0.0, 0.0) / r;
      if (!rep.alpha_hat || a > *rep.alpha_hat) rep.alpha_hat = a;
      if (a > 1.0 - margin)
        witness({"A2", r, 0, 0, 0, detail::relation_eval_checked(f, r, 0.0, 0.0), r});
    }
  });

  if (!rep.witnesses.empty())
    rep.verdict = ClassVerdict::fail;
  else if (!hypothesis_fired)
    rep.verdict = ClassVerdict::inconclusive;
  else
    rep.verdict = ClassVerdict::pass;
  return rep;
}

/// Same sampling scheme for the class-A' conditions. alpha_hat is not
/// populated (the class has no such constant).
inline ClassReport check_class_Aprime(const RelationExpr& f, double R_dom = 10.0,
                                      long n_samples = 100000, double tol = 1e-9,
                                      double margin = 1e-6,
                                      std::uint64_t seed = kDefaultSeed) {
  if (n_samples < 1) fail(errc::schema_error, "n_samples must be >= 1");
  if (R_dom <= 0) fail(errc::schema_error, "R_dom must be positive");
  ClassReport rep;
  rep.domain_bound = R_dom;
  bool hypothesis_fired = false;

  auto witness = [&rep](ClassWitness w) {
    if (rep.witnesses.size() < detail::kMaxClassWitnesses)
      rep.witnesses.push_back(std::move(w));
  };

  long pair_budget = n_samples - n_samples / 2;
  detail::for_each_pair_sample(R_dom, pair_budget, seed, [&](double r, double s) {
    ++rep.samples_checked;
    double f_hyp = detail::relation_eval_checked(f, s, 0.0, r + s);
    if (r <= f_hyp + tol) {
      hypothesis_fired = true;
      if (s <= tol) {
        if (r > tol) witness({"A'1", r, s, 0, 0, r, f_hyp});
      } else {
        double ratio = r / s;
        if (!rep.k_hat || ratio > *rep.k_hat) rep.k_hat = ratio;
        if (ratio > 1.0 - margin) witness({"A'1", r, s, 0, 0, r, s});
      }
    }
    double f_rrr = detail::relation_eval_checked(f, r, r, r);
    if (r <= f_rrr + tol && r > tol) witness({"A'3", r, r, r, 0, r, f_rrr});
  });

  // monotonicity in the third argument over sampled (r, s, t <= t1)
  long quad_budget = n_samples / 2;
  int level = detail::dyadic_level(quad_budget / 2, 4);
  long side = (1L << level) + 1;
  double denom = static_cast<double>(1L << level);
  long produced = 0;
  auto check_mono = [&](double r, double s, double t, double t1) {
    ++rep.samples_checked;
    double lo = detail::relation_eval_checked(f, r, s, t);
    double hi = detail::relation_eval_checked(f, r, s, t1);
    if (lo > hi + tol) witness({"A'2", r, s, t, t1, lo, hi});
  };
  for (long i = 0; i < side; ++i)
    for (long j = 0; j < side; ++j)
      for (long k = 0; k < side; ++k)
        for (long l = k; l < side; ++l) {
          check_mono(R_dom * (static_cast<double>(i) / denom),
                     R_dom * (static_cast<double>(j) / denom),
                     R_dom * (static_cast<double>(k) / denom),
                     R_dom * (static_cast<double>(l) / denom));
          ++produced;
        }
  Rng rng(seed ^ 0x5EEDULL);
  for (; produced < quad_budget; ++produced) {
    double t0 = rng.uniform(0, R_dom), t1v = rng.uniform(0, R_dom);
    if (t0 > t1v) std::swap(t0, t1v);
    check_mono(rng.uniform(0, R_dom), rng.uniform(0, R_dom), t0, t1v);
  }

  if (!rep.witnesses.empty())
    rep.verdict = ClassVerdict::fail;
  else if (!hypothesis_fired)
    rep.verdict = ClassVerdict::inconclusive;
  else
    rep.verdict = ClassVerdict::pass;
  return rep;
}

inline ClassReport check_class(const RelationExpr& f, RelationClass cls,
                               double R_dom = 10.0, long n_samples = 100000,
                               double tol = 1e-9, double margin = 1e-6,
                               std::uint64_t seed = kDefaultSeed) {
  return cls == RelationClass::A
             ? check_class_A(f, R_dom, n_samples, tol, margin, seed)
             : check_class_Aprime(f, R_dom, n_samples, tol, margin, seed);
}

// ---------------------------------------------------------------------------
// Named relation catalog
// ---------------------------------------------------------------------------

namespace detail {

inline double require_param(const std::map<std::string, double>& params,
                            const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) fail(errc::param_out_of_range, "missing parameter '" + name + "'");
  return it->second;
}

inline void require_range(double v, double lo, double hi_exclusive, const std::string& name) {
  if (!(v >= lo && v < hi_exclusive))
    fail(errc::param_out_of_range,
         name + " = " + format_shortest(v) + " outside [" + format_shortest(lo) + ", " +
             format_shortest(hi_exclusive) + ")");
}

}  // namespace detail

/// Builds one of the named relation families with constants substituted:
///   basha     alpha*r                    alpha in [0, 1)
///   kannan    alpha*(s+t)                alpha in [0, 1/2)
///   reich     a1*r+a2*s+a3*t             a_i in [0, 1), a1+a2+a3 < 1
///   bianchini alpha*max(s,t)             alpha in [0, 1)
///   khan      alpha*sqrt(s*t)            alpha in [0, 1)
inline RelationExpr catalog_relation(const std::string& name,
                                     const std::map<std::string, double>& params) {
  std::string text;
  if (name == "basha") {
    double a = detail::require_param(params, "alpha");
    detail::require_range(a, 0.0, 1.0, "alpha");
    text = format_shortest(a) + "*r";
  } else if (name == "kannan") {
    double a = detail::require_param(params, "alpha");
    detail::require_range(a, 0.0, 0.5, "alpha");
    text = format_shortest(a) + "*(s+t)";
  } else if (name == "reich") {
    double a1 = detail::require_param(params, "alpha1");
    double a2 = detail::require_param(params, "alpha2");
    double a3 = detail::require_param(params, "alpha3");
    detail::require_range(a1, 0.0, 1.0, "alpha1");
    detail::require_range(a2, 0.0, 1.0, "alpha2");
    detail::require_range(a3, 0.0, 1.0, "alpha3");
    if (a1 + a2 + a3 >= 1.0)
      fail(errc::param_out_of_range, "reich requires alpha1+alpha2+alpha3 < 1");
    text = format_shortest(a1) + "*r+" + format_shortest(a2) + "*s+" +
           format_shortest(a3) + "*t";
  } else if (name == "bianchini") {
    double a = detail::require_param(params, "alpha");
    detail::require_range(a, 0.0, 1.0, "alpha");
    text = format_shortest(a) + "*max(s,t)";
  } else if (name == "khan") {
    double a = detail::require_param(params, "alpha");
    detail::require_range(a, 0.0, 1.0, "alpha");
    text = format_shortest(a) + "*sqrt(s*t)";
  } else {
    fail(errc::unknown_name, "no catalog relation named '" + name + "'");
  }
  RelationExpr rel = parse_relation(text);
  rel.params.assign(params.begin(), params.end());
  std::sort(rel.params.begin(), rel.params.end());
  return rel;
}

}  // namespace proxipoint
