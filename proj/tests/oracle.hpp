// Test-side oracles. Everything here is deliberately written from scratch
// (plain loops over hand-rolled grids) so it shares no code path with the
// library functions it checks.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Pt = std::vector<double>;

inline double dist_l1(const Pt& a, const Pt& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

inline double dist_l2(const Pt& a, const Pt& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double dist_linf(const Pt& a, const Pt& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::fabs(a[i] - b[i]));
  return s;
}

inline double dist_by_kind(int kind, const Pt& a, const Pt& b) {
  if (kind == 0) return dist_l1(a, b);
  if (kind == 1) return dist_l2(a, b);
  return dist_linf(a, b);
}

/// 1-D grid with n+1 evenly spaced points, endpoints included.
inline std::vector<double> grid1(double lo, double hi, int n) {
  std::vector<double> g;
  g.reserve(n + 1);
  for (int i = 0; i <= n; ++i) g.push_back(lo + (hi - lo) * i / n);
  return g;
}

/// Dense 2-D grid over a box.
inline std::vector<Pt> grid2(double xlo, double xhi, double ylo, double yhi, int n) {
  std::vector<Pt> g;
  g.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      g.push_back({xlo + (xhi - xlo) * i / n, ylo + (yhi - ylo) * j / n});
  return g;
}

/// Minimum pairwise distance between two point clouds.
inline double brute_min_distance(int kind, const std::vector<Pt>& a,
                                 const std::vector<Pt>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a)
    for (const auto& q : b) best = std::min(best, dist_by_kind(kind, p, q));
  return best;
}

/// Nearest cloud member to p.
inline Pt brute_nearest(int kind, const std::vector<Pt>& cloud, const Pt& p) {
  Pt best;
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& q : cloud) {
    double d = dist_by_kind(kind, q, p);
    if (d < bd) {
      bd = d;
      best = q;
    }
  }
  return best;
}

}  // namespace oracle
