#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace proxipoint {

using Point = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline double linf_between(const Point& a, const Point& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Metric
// ---------------------------------------------------------------------------

enum class MetricKind { l1, l2, linf };

struct Metric {
  MetricKind kind = MetricKind::l2;
  int dim = 1;
};

inline double metric_eval(const Metric& m, const Point& p, const Point& q) {
  if (static_cast<int>(p.size()) != m.dim || static_cast<int>(q.size()) != m.dim)
    fail(errc::dimension_mismatch,
         "metric_eval on points of size " + std::to_string(p.size()) + "/" +
             std::to_string(q.size()) + " with metric dim " + std::to_string(m.dim));
  switch (m.kind) {
    case MetricKind::l1: {
      double s = 0.0;
      for (int i = 0; i < m.dim; ++i) s += std::abs(p[i] - q[i]);
      return s;
    }
    case MetricKind::l2: {
      double s = 0.0;
      for (int i = 0; i < m.dim; ++i) {
        double d = p[i] - q[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case MetricKind::linf: {
      double s = 0.0;
      for (int i = 0; i < m.dim; ++i) s = std::max(s, std::abs(p[i] - q[i]));
      return s;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Region
// ---------------------------------------------------------------------------

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
};

enum class ShapeKind { interval, box, segment, finite_set, union_of };

/// Closed subset of R^n: an interval (one end may be infinite), an
/// axis-aligned box, an axis-aligned segment, a finite point set, or a union
/// of such shapes. Interval/box/segment share one representation (per-axis
/// ranges); a segment is stored as its endpoints too so it serializes back
/// in the form it was written.
class Region {
 public:
  static Region interval(double lo, double hi) {
    Region r;
    r.kind_ = ShapeKind::interval;
    r.axes_ = {{lo, hi}};
    r.validate_axes();
    return r;
  }

  static Region box(std::vector<AxisRange> axes) {
    Region r;
    r.kind_ = ShapeKind::box;
    r.axes_ = std::move(axes);
    if (r.axes_.empty()) fail(errc::schema_error, "box needs at least one axis");
    r.validate_axes();
    return r;
  }

  /// Axis-aligned segment: endpoints may differ in at most one coordinate.
  static Region segment(Point a, Point b) {
    if (a.size() != b.size() || a.empty())
      fail(errc::dimension_mismatch, "segment endpoints disagree in dimension");
    int moving = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
        fail(errc::schema_error, "segment endpoints must be finite");
      if (a[i] != b[i]) ++moving;
    }
    if (moving > 1)
      fail(errc::schema_error, "segment endpoints must be axis-aligned");
    Region r;
    r.kind_ = ShapeKind::segment;
    r.axes_.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      r.axes_[i] = {std::min(a[i], b[i]), std::max(a[i], b[i])};
    r.seg_a_ = std::move(a);
    r.seg_b_ = std::move(b);
    return r;
  }

  static Region finite_set(std::vector<Point> pts) {
    if (pts.empty()) fail(errc::schema_error, "finite set must be nonempty");
    std::size_t d = pts.front().size();
    for (const auto& p : pts) {
      if (p.size() != d) fail(errc::dimension_mismatch, "finite set points disagree in dimension");
      for (double c : p)
        if (!std::isfinite(c)) fail(errc::schema_error, "finite set points must be finite");
    }
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    Region r;
    r.kind_ = ShapeKind::finite_set;
    r.points_ = std::move(pts);
    return r;
  }

  static Region union_of(std::vector<Region> parts) {
    if (parts.empty()) fail(errc::schema_error, "union must be nonempty");
    int d = parts.front().dim();
    for (const auto& p : parts)
      if (p.dim() != d) fail(errc::dimension_mismatch, "union parts disagree in dimension");
    Region r;
    r.kind_ = ShapeKind::union_of;
    r.parts_ = std::move(parts);
    return r;
  }

  ShapeKind kind() const { return kind_; }

  int dim() const {
    switch (kind_) {
      case ShapeKind::interval:
      case ShapeKind::box:
      case ShapeKind::segment: return static_cast<int>(axes_.size());
      case ShapeKind::finite_set: return static_cast<int>(points_.front().size());
      case ShapeKind::union_of: return parts_.front().dim();
    }
    return 0;
  }

  bool boxlike() const {
    return kind_ == ShapeKind::interval || kind_ == ShapeKind::box ||
           kind_ == ShapeKind::segment;
  }

  const std::vector<AxisRange>& axes() const { return axes_; }
  const Point& segment_a() const { return seg_a_; }
  const Point& segment_b() const { return seg_b_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<Region>& parts() const { return parts_; }

  /// Bound applied when sampling unbounded shapes.
  double trunc_radius = 100.0;

 private:
  void validate_axes() const {
    for (const auto& ax : axes_) {
      if (std::isnan(ax.lo) || std::isnan(ax.hi))
        fail(errc::schema_error, "interval bound is NaN");
      if (ax.lo > ax.hi) fail(errc::schema_error, "interval has lo > hi");
      if (ax.lo == -kInf && ax.hi == kInf)
        fail(errc::schema_error, "interval may have at most one infinite end");
    }
  }

  ShapeKind kind_ = ShapeKind::interval;
  std::vector<AxisRange> axes_;
  Point seg_a_, seg_b_;
  std::vector<Point> points_;
  std::vector<Region> parts_;
};

// ---------------------------------------------------------------------------
// Projection and distances to a point
// ---------------------------------------------------------------------------

/// Nearest point of the region; ties broken toward lexicographically
/// smallest coordinates. Exact (coordinate clamping) for interval, box and
/// segment under L1/L2/Linf, since all three are monotone in the per-axis
/// deviations.
inline Point region_project(const Region& r, const Point& p, const Metric& m) {
  if (static_cast<int>(p.size()) != r.dim())
    fail(errc::dimension_mismatch, "region_project dimension mismatch");
  if (r.boxlike()) {
    Point q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      q[i] = std::min(std::max(p[i], r.axes()[i].lo), r.axes()[i].hi);
    return q;
  }
  if (r.kind() == ShapeKind::finite_set) {
    const Point* best = nullptr;
    double best_d = kInf;
    for (const auto& cand : r.points()) {
      double d = metric_eval(m, cand, p);
      if (d < best_d || (d == best_d && best && lex_less(cand, *best))) {
        best = &cand;
        best_d = d;
      }
    }
    return *best;
  }
  // union
  Point best;
  double best_d = kInf;
  for (const auto& part : r.parts()) {
    Point q = region_project(part, p, m);
    double d = metric_eval(m, q, p);
    if (d < best_d || (d == best_d && !best.empty() && lex_less(q, best))) {
      best = std::move(q);
      best_d = d;
    }
  }
  return best;
}

/// dist(p, region) in the given metric.
inline double region_distance(const Region& r, const Point& p, const Metric& m) {
  return metric_eval(m, region_project(r, p, m), p);
}

/// sup over the region of the distance to p (infinite for unbounded shapes).
inline double region_max_distance(const Region& r, const Point& p, const Metric& m) {
  if (static_cast<int>(p.size()) != r.dim())
    fail(errc::dimension_mismatch, "region_max_distance dimension mismatch");
  if (r.boxlike()) {
    switch (m.kind) {
      case MetricKind::l1: {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
          s += std::max(std::abs(p[i] - r.axes()[i].lo), std::abs(p[i] - r.axes()[i].hi));
        return s;
      }
      case MetricKind::l2: {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
          double a = std::max(std::abs(p[i] - r.axes()[i].lo), std::abs(p[i] - r.axes()[i].hi));
          s += a * a;
        }
        return std::sqrt(s);
      }
      case MetricKind::linf: {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
          s = std::max(s, std::max(std::abs(p[i] - r.axes()[i].lo), std::abs(p[i] - r.axes()[i].hi)));
        return s;
      }
    }
  }
  if (r.kind() == ShapeKind::finite_set) {
    double s = 0.0;
    for (const auto& cand : r.points()) s = std::max(s, metric_eval(m, cand, p));
    return s;
  }
  double s = 0.0;
  for (const auto& part : r.parts()) s = std::max(s, region_max_distance(part, p, m));
  return s;
}

/// Membership within tol, measured as distance to the region.
inline bool region_contains(const Region& r, const Point& p, double tol, const Metric& m) {
  return region_distance(r, p, m) <= tol;
}

/// How far the sphere {u : d(u, y) = radius} is from touching the region,
/// as a deviation in distance units: 0 when some region point lies at
/// exactly that distance from y. Exact for the shape catalog because the
/// attained distances over each connected piece form the interval
/// [min, max].
inline double region_sphere_gap(const Region& r, const Point& y, double radius,
                                const Metric& m) {
  if (r.kind() == ShapeKind::union_of) {
    double best = kInf;
    for (const auto& part : r.parts())
      best = std::min(best, region_sphere_gap(part, y, radius, m));
    return best;
  }
  if (r.kind() == ShapeKind::finite_set) {
    double best = kInf;
    for (const auto& cand : r.points())
      best = std::min(best, std::abs(metric_eval(m, cand, y) - radius));
    return best;
  }
  double lo = region_distance(r, y, m);
  double hi = region_max_distance(r, y, m);
  if (radius < lo) return lo - radius;
  if (radius > hi) return radius - hi;
  return 0.0;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace detail {

/// Uniform grid on [lo, hi] with spacing <= res, endpoints included exactly.
inline std::vector<double> axis_grid(double lo, double hi, double res) {
  if (hi <= lo) return {lo};
  double span = hi - lo;
  long n = static_cast<long>(std::ceil(span / res - 1e-12));
  if (n < 1) n = 1;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i < n; ++i) pts.push_back(lo + span * static_cast<double>(i) / static_cast<double>(n));
  pts.push_back(hi);
  return pts;
}

/// Grid on [max(lo,c-radius), min(hi,c+radius)] anchored at c (points of the
/// form c + k*res), with the window bounds themselves included. Anchoring at
/// c lets refinement land on dyadic optima exactly.
inline std::vector<double> axis_window(double lo, double hi, double c, double radius,
                                       double res) {
  double a = std::max(lo, c - radius);
  double b = std::min(hi, c + radius);
  if (a > b) return {};
  std::vector<double> pts;
  long k0 = static_cast<long>(std::floor((a - c) / res)) - 1;
  long k1 = static_cast<long>(std::ceil((b - c) / res)) + 1;
  for (long k = k0; k <= k1; ++k) {
    double v = c + static_cast<double>(k) * res;
    if (v >= a && v <= b) pts.push_back(v);
  }
  pts.push_back(a);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

inline void cartesian_product(const std::vector<std::vector<double>>& axes,
                              std::vector<Point>& out) {
  Point cur(axes.size());
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  out.reserve(out.size() + total);
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    for (std::size_t i = 0; i < axes.size(); ++i) cur[i] = axes[i][idx[i]];
    out.push_back(cur);
    std::size_t i = axes.size();
    while (i > 0) {
      --i;
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
  }
}

inline void sample_into(const Region& r, double res, double trunc,
                        std::vector<Point>& out) {
  if (r.boxlike()) {
    std::vector<std::vector<double>> axes;
    axes.reserve(r.axes().size());
    for (const auto& ax : r.axes()) {
      double lo = std::max(ax.lo, -trunc);
      double hi = std::min(ax.hi, trunc);
      if (lo > hi) return;  // empty after truncation
      axes.push_back(axis_grid(lo, hi, res));
    }
    cartesian_product(axes, out);
    return;
  }
  if (r.kind() == ShapeKind::finite_set) {
    for (const auto& p : r.points()) {
      bool in = true;
      for (double c : p)
        if (std::abs(c) > trunc) in = false;
      if (in) out.push_back(p);
    }
    return;
  }
  for (const auto& part : r.parts()) sample_into(part, res, trunc, out);
}

inline void window_into(const Region& r, const Point& c, double radius, double res,
                        std::vector<Point>& out) {
  if (r.boxlike()) {
    std::vector<std::vector<double>> axes;
    axes.reserve(r.axes().size());
    for (std::size_t i = 0; i < r.axes().size(); ++i) {
      auto pts = axis_window(r.axes()[i].lo, r.axes()[i].hi, c[i], radius, res);
      if (pts.empty()) return;
      axes.push_back(std::move(pts));
    }
    cartesian_product(axes, out);
    return;
  }
  if (r.kind() == ShapeKind::finite_set) {
    for (const auto& p : r.points())
      if (linf_between(p, c) <= radius) out.push_back(p);
    return;
  }
  for (const auto& part : r.parts()) window_into(part, c, radius, res, out);
}

inline void sort_unique(std::vector<Point>& pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

}  // namespace detail

/// Finite grid covering the part of the region inside [-trunc, trunc]^n with per-axis spacing
/// <= resolution. Lexicographically sorted, duplicates removed.
inline std::vector<Point> region_sample(const Region& r, double resolution,
                                        std::optional<double> trunc_radius = {}) {
  if (resolution <= 0) fail(errc::schema_error, "resolution must be positive");
  double trunc = trunc_radius.value_or(r.trunc_radius);
  std::vector<Point> out;
  detail::sample_into(r, resolution, trunc, out);
  if (out.empty())
    fail(errc::empty_after_truncation,
         "region has no sample inside truncation radius " + std::to_string(trunc));
  detail::sort_unique(out);
  return out;
}

/// Grid restricted to an L-inf window around `center`, anchored at the
/// center. Used by local refinement. May be empty.
inline std::vector<Point> region_sample_window(const Region& r, const Point& center,
                                               double radius, double resolution) {
  std::vector<Point> out;
  detail::window_into(r, center, radius, resolution, out);
  detail::sort_unique(out);
  return out;
}

// ---------------------------------------------------------------------------
// Multi-candidate grid-refinement minimizer
// ---------------------------------------------------------------------------

struct ScoredPoint {
  Point point;
  double value = kInf;
};

struct MinimizeOptions {
  double start_resolution = 1.0 / 16;
  int max_halvings = 48;
  int keep = 16;              // candidate basins carried between levels
  double stop_below = 0.0;    // stop once the best value is <= this
  std::optional<double> trunc_radius;
};

namespace detail {

inline void select_candidates(std::vector<ScoredPoint>& cands, int keep,
                              double dedupe_radius) {
  std::sort(cands.begin(), cands.end(), [](const ScoredPoint& a, const ScoredPoint& b) {
    if (a.value != b.value) return a.value < b.value;
    return lex_less(a.point, b.point);
  });
  std::vector<ScoredPoint> kept;
  for (const auto& c : cands) {
    bool dup = false;
    for (const auto& k : kept)
      if (linf_between(c.point, k.point) <= dedupe_radius) {
        dup = true;
        break;
      }
    if (!dup) {
      kept.push_back(c);
      if (static_cast<int>(kept.size()) >= keep) break;
    }
  }
  cands = std::move(kept);
}

}  // namespace detail

/// Minimizes `objective` over the region by coarse sampling followed by
/// nested local refinement (halving the resolution, re-sampling a window
/// around each surviving candidate). Keeps several candidates so distinct
/// basins survive; returns them sorted by value, then lexicographically.
template <class F>
std::vector<ScoredPoint> refine_minimize(const Region& region, F&& objective,
                                         const MinimizeOptions& opt = {},
                                         const std::vector<Point>& seeds = {}) {
  double res = opt.start_resolution;
  std::vector<Point> pts = region_sample(region, res, opt.trunc_radius);
  pts.insert(pts.end(), seeds.begin(), seeds.end());

  std::vector<ScoredPoint> cands;
  cands.reserve(pts.size());
  for (auto& p : pts) cands.push_back({std::move(p), 0.0});
  for (auto& c : cands) c.value = objective(c.point);
  detail::select_candidates(cands, opt.keep, 2 * res);

  for (int level = 0; level < opt.max_halvings; ++level) {
    if (!cands.empty() && cands.front().value <= opt.stop_below) break;
    double radius = 2 * res;
    res /= 2;
    std::vector<ScoredPoint> next = cands;
    for (const auto& c : cands) {
      auto local = region_sample_window(region, c.point, radius, res);
      for (auto& p : local) {
        ScoredPoint sp{std::move(p), 0.0};
        sp.value = objective(sp.point);
        next.push_back(std::move(sp));
      }
    }
    detail::select_candidates(next, opt.keep, 2 * res);
    cands = std::move(next);
  }
  return cands;
}

// ---------------------------------------------------------------------------
// Distance between regions
// ---------------------------------------------------------------------------

struct DistanceCertificate {
  double value = 0.0;
  Point witness_g, witness_h;
  bool analytic = true;
  double resolution = 0.0;  // meaningful for grid certificates

  std::string method() const {
    if (analytic) return "analytic";
    return "grid(" + std::to_string(resolution) + ")";
  }
};

namespace detail {

inline DistanceCertificate boxlike_distance(const Region& g, const Region& h,
                                            const Metric& m) {
  std::size_t n = g.axes().size();
  Point wg(n), wh(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = g.axes()[i];
    const auto& b = h.axes()[i];
    double gap;
    if (a.lo > b.hi) {
      gap = a.lo - b.hi;
      wg[i] = a.lo;
      wh[i] = b.hi;
    } else if (b.lo > a.hi) {
      gap = b.lo - a.hi;
      wg[i] = a.hi;
      wh[i] = b.lo;
    } else {
      gap = 0.0;
      double t = std::max(a.lo, b.lo);
      if (t == -kInf) t = std::min(a.hi, b.hi);
      if (t == kInf || t == -kInf) t = 0.0;
      wg[i] = wh[i] = t;
    }
    switch (m.kind) {
      case MetricKind::l1: acc += gap; break;
      case MetricKind::l2: acc += gap * gap; break;
      case MetricKind::linf: acc = std::max(acc, gap); break;
    }
  }
  double value = (m.kind == MetricKind::l2) ? std::sqrt(acc) : acc;
  return {value, std::move(wg), std::move(wh), true, 0.0};
}

}  // namespace detail

/// Infimum of d(g, h) over g in G, h in H, with witnesses. Analytic for the
/// whole shape catalog: boxlike pairs reduce to per-axis gaps, finite sets
/// to projections, unions to minima over parts.
inline DistanceCertificate distance_between_regions(const Region& G, const Region& H,
                                                    const Metric& m) {
  if (G.dim() != H.dim() || G.dim() != m.dim)
    fail(errc::dimension_mismatch, "distance_between_regions dimension mismatch");
  if (G.kind() == ShapeKind::union_of) {
    DistanceCertificate best;
    best.value = kInf;
    for (const auto& part : G.parts()) {
      auto c = distance_between_regions(part, H, m);
      if (c.value < best.value) best = std::move(c);
    }
    return best;
  }
  if (H.kind() == ShapeKind::union_of) {
    DistanceCertificate best;
    best.value = kInf;
    for (const auto& part : H.parts()) {
      auto c = distance_between_regions(G, part, m);
      if (c.value < best.value) best = std::move(c);
    }
    return best;
  }
  if (G.kind() == ShapeKind::finite_set) {
    DistanceCertificate best;
    best.value = kInf;
    for (const auto& p : G.points()) {
      Point q = region_project(H, p, m);
      double d = metric_eval(m, p, q);
      if (d < best.value) best = {d, p, std::move(q), true, 0.0};
    }
    return best;
  }
  if (H.kind() == ShapeKind::finite_set) {
    DistanceCertificate best;
    best.value = kInf;
    for (const auto& p : H.points()) {
      Point q = region_project(G, p, m);
      double d = metric_eval(m, q, p);
      if (d < best.value) best = {d, std::move(q), p, true, 0.0};
    }
    return best;
  }
  return detail::boxlike_distance(G, H, m);
}

/// Grid-refinement fallback: coarse sample of both regions, best pair, then
/// nested local refinement around the current best pair. Kept alongside the
/// analytic route and cross-checked in tests.
inline DistanceCertificate distance_between_regions_grid(const Region& G, const Region& H,
                                                         const Metric& m,
                                                         double start_resolution = 1.0 / 16,
                                                         int refine_steps = 20) {
  if (G.dim() != H.dim() || G.dim() != m.dim)
    fail(errc::dimension_mismatch, "distance_between_regions dimension mismatch");
  double res = start_resolution;
  auto gs = region_sample(G, res);
  auto hs = region_sample(H, res);
  DistanceCertificate best;
  best.value = kInf;
  best.analytic = false;
  for (const auto& g : gs)
    for (const auto& h : hs) {
      double d = metric_eval(m, g, h);
      if (d < best.value) {
        best.value = d;
        best.witness_g = g;
        best.witness_h = h;
      }
    }
  for (int step = 0; step < refine_steps; ++step) {
    double radius = 2 * res;
    res /= 2;
    auto gw = region_sample_window(G, best.witness_g, radius, res);
    auto hw = region_sample_window(H, best.witness_h, radius, res);
    for (const auto& g : gw)
      for (const auto& h : hw) {
        double d = metric_eval(m, g, h);
        if (d < best.value) {
          best.value = d;
          best.witness_g = g;
          best.witness_h = h;
        }
      }
  }
  best.resolution = res;
  return best;
}

}  // namespace proxipoint
