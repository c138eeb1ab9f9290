#include <catch2/catch_amalgamated.hpp>

#include <proxipoint/geometry.hpp>

#include <cmath>
#include <random>

#include "oracle.hpp"

using namespace proxipoint;

namespace {

Metric l1_2d() { return {MetricKind::l1, 2}; }

Region segment_union_G() {
  // vertical arm x=2, 0<=y<=3 joined with horizontal arm 0<=x<=2, y=2
  return Region::union_of({Region::segment({2, 0}, {2, 3}), Region::segment({0, 2}, {2, 2})});
}

}  // namespace

TEST_CASE("metric_eval matches the catalog values", "[geometry]") {
  CHECK(metric_eval({MetricKind::l1, 2}, {4, 0}, {1, 0}) == 3.0);
  CHECK(metric_eval({MetricKind::l2, 2}, {0, 0}, {3, 4}) == 5.0);
  CHECK(metric_eval({MetricKind::linf, 2}, {0, 0}, {3, 4}) == 4.0);
  CHECK(metric_eval({MetricKind::l2, 3}, {1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK_THROWS_AS(metric_eval({MetricKind::l1, 2}, {1}, {1, 2}), Error);
}

TEST_CASE("metric axioms hold on sampled points", "[geometry]") {
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> coord(-50, 50);
  for (MetricKind kind : {MetricKind::l1, MetricKind::l2, MetricKind::linf}) {
    Metric m{kind, 3};
    for (int it = 0; it < 500; ++it) {
      Point p{coord(gen), coord(gen), coord(gen)};
      Point q{coord(gen), coord(gen), coord(gen)};
      Point r{coord(gen), coord(gen), coord(gen)};
      double pq = metric_eval(m, p, q);
      CHECK(pq >= 0.0);
      CHECK(pq == metric_eval(m, q, p));
      CHECK(metric_eval(m, p, p) == 0.0);
      CHECK(metric_eval(m, p, r) <= pq + metric_eval(m, q, r) + 1e-12);
    }
  }
}

TEST_CASE("region_contains on boundary, outside, and union points", "[geometry]") {
  Metric m1{MetricKind::l2, 1};
  CHECK(region_contains(Region::interval(2, kInf), {2}, 1e-9, m1));
  CHECK_FALSE(region_contains(Region::interval(6, 7), {5}, 1e-9, m1));
  CHECK(region_contains(segment_union_G(), {2, 1.5}, 1e-9, l1_2d()));
  CHECK_FALSE(region_contains(segment_union_G(), {1, 1}, 1e-9, l1_2d()));
}

TEST_CASE("region_sample produces uniform grids", "[geometry]") {
  auto pts = region_sample(Region::interval(6, 7), 0.5);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0][0] == 6.0);
  CHECK(pts[1][0] == 6.5);
  CHECK(pts[2][0] == 7.0);

  auto ray = region_sample(Region::interval(2, kInf), 1.0, 10.0);
  REQUIRE(ray.size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(ray[i][0] == 2.0 + i);

  auto fs = region_sample(Region::finite_set({{1, 2}}), 0.25);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0] == Point{1, 2});

  CHECK_THROWS_AS(region_sample(Region::interval(200, kInf), 1.0, 100.0), Error);
}

TEST_CASE("region_sample covers every region point within the resolution", "[geometry]") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u01(0, 1);
  Region box = Region::box({{4, 5}, {0, 1}});
  auto samples = region_sample(box, 1.0 / 16);
  Metric m = l1_2d();
  for (int it = 0; it < 300; ++it) {
    Point p{4 + u01(gen), u01(gen)};
    double best = kInf;
    for (const auto& s : samples) best = std::min(best, metric_eval(m, s, p));
    CHECK(best <= 1.0 / 16 + 1e-12);
  }
}

TEST_CASE("region_project clamps analytically", "[geometry]") {
  Metric m1{MetricKind::l2, 1};
  CHECK(region_project(Region::interval(2, kInf), {0.5}, m1) == Point{2});
  CHECK(region_project(Region::box({{4, 5}, {0, 1}}), {1, 0.5}, l1_2d()) == Point{4, 0.5});
  CHECK(region_project(Region::segment({2, 0}, {2, 3}), {1, 0}, l1_2d()) == Point{2, 0});
}

TEST_CASE("region_project beats every grid sample", "[geometry]") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> coord(-3, 8);
  struct Case {
    Region region;
    int dim;
  };
  std::vector<Case> cases;
  cases.push_back({Region::interval(2, kInf), 1});
  cases.push_back({Region::box({{4, 5}, {0, 1}}), 2});
  cases.push_back({Region::segment({2, 0}, {2, 3}), 2});
  cases.push_back({Region::finite_set({{0, 0}, {1, 3}, {-2, 5}}), 2});
  cases.push_back({segment_union_G(), 2});

  for (const auto& c : cases) {
    auto samples = region_sample(c.region, 1.0 / 32, 20.0);
    for (int kind = 0; kind < 3; ++kind) {
      Metric m{static_cast<MetricKind>(kind), c.dim};
      for (int it = 0; it < 350; ++it) {
        Point p(c.dim);
        for (auto& x : p) x = coord(gen);
        Point proj = region_project(c.region, p, m);
        double dp = metric_eval(m, proj, p);
        CHECK(region_contains(c.region, proj, 1e-9, m));
        for (const auto& s : samples) {
          CHECK(dp <= metric_eval(m, s, p) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("distance_between_regions analytic catalog", "[geometry]") {
  Metric m1{MetricKind::l2, 1};
  auto c1 = distance_between_regions(Region::interval(2, kInf),
                                     Region::interval(-kInf, -1), m1);
  CHECK(c1.value == 3.0);
  CHECK(c1.witness_g == Point{2});
  CHECK(c1.witness_h == Point{-1});
  CHECK(c1.method() == "analytic");

  auto c2 = distance_between_regions(Region::interval(6, 7), Region::interval(2, 3), m1);
  CHECK(c2.value == 3.0);

  auto c3 = distance_between_regions(Region::box({{4, 5}, {0, 1}}),
                                     Region::box({{0, 1}, {0, 1}}), l1_2d());
  CHECK(c3.value == 3.0);
  CHECK(metric_eval(l1_2d(), c3.witness_g, c3.witness_h) == c3.value);

  // the segment-union instance: dist(G, H) = 1
  auto c4 = distance_between_regions(segment_union_G(), Region::box({{0, 1}, {0, 1}}),
                                     l1_2d());
  CHECK(c4.value == 1.0);
}

TEST_CASE("distance_between_regions is symmetric and matches brute force", "[geometry]") {
  std::vector<std::pair<Region, Region>> pairs;
  pairs.emplace_back(Region::interval(6, 7), Region::interval(2, 3));
  pairs.emplace_back(Region::box({{4, 5}, {0, 1}}), Region::box({{0, 1}, {0, 1}}));
  pairs.emplace_back(segment_union_G(), Region::box({{0, 1}, {0, 1}}));
  pairs.emplace_back(Region::finite_set({{3, 3}, {10, 10}}), Region::box({{0, 1}, {0, 1}}));

  for (const auto& [G, H] : pairs) {
    for (int kind = 0; kind < 3; ++kind) {
      Metric m{static_cast<MetricKind>(kind), G.dim()};
      auto ab = distance_between_regions(G, H, m);
      auto ba = distance_between_regions(H, G, m);
      CHECK(ab.value == ba.value);

      // brute force over the sample grids
      auto gs = region_sample(G, 1.0 / 32, 20.0);
      auto hs = region_sample(H, 1.0 / 32, 20.0);
      double brute = oracle::brute_min_distance(kind, gs, hs);
      CHECK(std::abs(ab.value - brute) <= 1.0 / 16);
      CHECK(ab.value <= brute + 1e-12);  // infimum can only be smaller

      // witnesses certify the value
      CHECK(region_contains(G, ab.witness_g, 1e-9, m));
      CHECK(region_contains(H, ab.witness_h, 1e-9, m));
      CHECK(std::abs(metric_eval(m, ab.witness_g, ab.witness_h) - ab.value) <= 1e-9);
    }
  }
}

TEST_CASE("grid refinement distance agrees with the analytic route", "[geometry]") {
  Metric m = l1_2d();
  auto analytic = distance_between_regions(Region::box({{4, 5}, {0, 1}}),
                                           Region::box({{0, 1}, {0, 1}}), m);
  auto grid = distance_between_regions_grid(Region::box({{4, 5}, {0, 1}}),
                                            Region::box({{0, 1}, {0, 1}}), m);
  CHECK(grid.method().rfind("grid(", 0) == 0);
  CHECK(std::abs(grid.value - analytic.value) <= 1e-6);

  Metric m1{MetricKind::l2, 1};
  auto g2 = distance_between_regions_grid(Region::interval(2, kInf),
                                          Region::interval(-kInf, -1), m1);
  CHECK(std::abs(g2.value - 3.0) <= 1e-6);
}

TEST_CASE("region_sphere_gap detects solvable and unsolvable radii", "[geometry]") {
  Metric m1{MetricKind::l2, 1};
  // |u - 2| = 3 over [6,7]: attained distances are [4,5], gap 1
  CHECK(region_sphere_gap(Region::interval(6, 7), {2}, 3.0, m1) == 1.0);
  // |u - (-1)| = 3 over [2,inf): attained [3,inf), gap 0
  CHECK(region_sphere_gap(Region::interval(2, kInf), {-1}, 3.0, m1) == 0.0);
  // two-interval G with H = {0}: radius 1/2 attainable
  Region twoG = Region::union_of({Region::interval(-1, -0.5), Region::interval(0.5, 1)});
  CHECK(region_sphere_gap(twoG, {0.0}, 0.5, m1) == 0.0);
  CHECK(region_sphere_gap(twoG, {0.0}, 0.25, m1) == 0.25);
}

TEST_CASE("refine_minimize finds interior and multi-basin minima", "[geometry]") {
  // interior minimum of a V-shaped objective
  auto res = refine_minimize(Region::interval(0, 10),
                             [](const Point& p) { return std::abs(p[0] - 3.141592653589793); });
  REQUIRE_FALSE(res.empty());
  CHECK(std::abs(res.front().point[0] - 3.141592653589793) < 1e-9);

  // both basins of ||x| - 0.5| over the two-interval region survive
  Region twoG = Region::union_of({Region::interval(-1, -0.5), Region::interval(0.5, 1)});
  auto multi = refine_minimize(twoG,
                               [](const Point& p) { return std::abs(std::abs(p[0]) - 0.5); });
  REQUIRE(multi.size() >= 2);
  CHECK(multi[0].value == 0.0);
  CHECK(multi[1].value == 0.0);
  double a = multi[0].point[0], b = multi[1].point[0];
  CHECK(std::abs(std::abs(a) - 0.5) < 1e-9);
  CHECK(std::abs(std::abs(b) - 0.5) < 1e-9);
  CHECK(a * b < 0);  // opposite signs: both basins present
}

TEST_CASE("region constructors validate their invariants", "[geometry]") {
  CHECK_THROWS_AS(Region::interval(7, 6), Error);
  CHECK_THROWS_AS(Region::interval(-kInf, kInf), Error);
  CHECK_THROWS_AS(Region::segment({0, 0}, {1, 1}), Error);  // not axis-aligned
  CHECK_THROWS_AS(Region::finite_set({}), Error);
  CHECK_THROWS_AS(Region::union_of({}), Error);
  CHECK_NOTHROW(Region::segment({2, 0}, {2, 3}));
}
