#include <catch2/catch_amalgamated.hpp>

#include <proxipoint/solver.hpp>

#include <cmath>

#include "instances.hpp"
#include "oracle.hpp"

using namespace proxipoint;

TEST_CASE("solve_first_kind reproduces the worked points", "[solver]") {
  {
    auto out = solve_first_kind(fixtures::basha_ex1(), {2});
    CHECK(out.point == Point{2});
    CHECK(out.residual == 0.0);
    CHECK(out.iterations == 1);
    CHECK(out.uniqueness.kind == UniquenessScan::Kind::unique);
    CHECK_FALSE(out.rate);  // single step: no rate estimate
  }
  {
    auto out = solve_first_kind(fixtures::kannan_ex(), {6});
    CHECK(out.point == Point{6});
    CHECK(out.residual == 0.0);
    CHECK(out.uniqueness.kind == UniquenessScan::Kind::unique);
  }
  {
    auto out = solve_first_kind(fixtures::piecewise_aprime(), {3});
    CHECK(out.point == Point{3});
    CHECK(out.residual == 0.0);
    CHECK(out.uniqueness.kind == UniquenessScan::Kind::unique);
  }
}

TEST_CASE("solve_first_kind halving trace on the L1 instance", "[solver]") {
  auto out = solve_first_kind(fixtures::l1_second_type(), {4, 1});
  REQUIRE(out.point.size() == 2);
  CHECK(out.point[0] == 4.0);
  CHECK(std::abs(out.point[1]) <= 1e-6);
  CHECK(out.residual <= 1e-6);

  // iterate second coordinates halve exactly: 1, 0.5, 0.25, ...
  const auto& it = out.trace.iterates;
  REQUIRE(it.size() >= 4);
  CHECK(it[0][1] == 1.0);
  CHECK(it[1][1] == 0.5);
  CHECK(it[2][1] == 0.25);
  CHECK(it[3][1] == 0.125);
  for (const auto& u : it) CHECK(u[0] == 4.0);

  REQUIRE(out.rate);
  CHECK(*out.rate == 0.5);

  // geometric envelope: steps[n] <= steps[0] * k^n + 1e-9
  double envelope = out.trace.steps[0];
  for (double s : out.trace.steps) {
    CHECK(s <= envelope + 1e-9);
    envelope *= *out.rate;
  }
}

TEST_CASE("solve_first_kind failure modes", "[solver]") {
  try {
    solve_first_kind(fixtures::kannan_ex(), {7});  // dist(7, H) = 4 != 3
    FAIL("expected StartNotProximal");
  } catch (const Error& e) {
    CHECK(e.code() == errc::start_not_proximal);
  }
  try {
    solve_first_kind(fixtures::hypothesis_fail(), {1});  // S(1) = 4 not reachable
    FAIL("expected NoFeasiblePoint");
  } catch (const Error& e) {
    CHECK(e.code() == errc::no_feasible_point);
  }
}

TEST_CASE("solve_second_kind on the second-type instances", "[solver]") {
  {
    auto out = solve_second_kind(fixtures::l1_second_type(), {4, 1});
    CHECK(out.point[0] == 4.0);
    CHECK(std::abs(out.point[1]) <= 1e-6);
    CHECK(out.residual <= 1e-6);
    REQUIRE(out.rate);
    CHECK(*out.rate == 0.5);
    CHECK(out.uniqueness.kind == UniquenessScan::Kind::unique);
    CHECK_FALSE(out.trace.image_steps.empty());
  }
  {
    auto out = solve_second_kind(fixtures::segment_union(), {2, 1});
    CHECK(std::abs(out.point[0] - 2.0) <= 1e-6);
    CHECK(std::abs(out.point[1]) <= 1e-6);
    CHECK(out.residual <= 1e-6);
    CHECK(out.uniqueness.kind == UniquenessScan::Kind::unique);
  }
  {
    auto out = solve_second_kind(fixtures::two_interval(), {0.5});
    CHECK(std::abs(std::abs(out.point[0]) - 0.5) <= 1e-6);
    REQUIRE(out.uniqueness.kind == UniquenessScan::Kind::multiple);
    REQUIRE(out.uniqueness.representatives.size() == 2);
    CHECK(std::abs(out.uniqueness.representatives[0][0] + 0.5) <= 1e-6);
    CHECK(std::abs(out.uniqueness.representatives[1][0] - 0.5) <= 1e-6);
  }
}

TEST_CASE("first and second kind agree where both hypotheses hold", "[solver]") {
  struct Start {
    ProximalInstance inst;
    Point x0;
  };
  std::vector<Start> runs = {{fixtures::basha_ex1(), {2}},
                             {fixtures::kannan_ex(), {6}},
                             {fixtures::piecewise_aprime(), {3}},
                             {fixtures::l1_second_type(), {4, 1}}};
  for (auto& run : runs) {
    auto first = solve_first_kind(run.inst, run.x0);
    auto second = solve_second_kind(run.inst, run.x0);
    REQUIRE(first.point.size() == second.point.size());
    for (std::size_t i = 0; i < first.point.size(); ++i)
      CHECK(std::abs(first.point[i] - second.point[i]) <= 1e-6);
  }
}

TEST_CASE("solve_strong builds the nested family and returns the point", "[solver]") {
  auto [out, family] = solve_strong(fixtures::strong_ex(), 64);
  CHECK(std::abs(out.point[0] - 1.0) <= 1e-6);
  CHECK(out.residual <= 1e-6);
  CHECK(out.uniqueness.kind == UniquenessScan::Kind::unique);
  REQUIRE(family.levels.size() == 64);
  REQUIRE(family.alpha);
  CHECK(*family.alpha == Catch::Approx(0.25).margin(1e-9));

  // F_4 = [0.5, 1]: diameter 1/2, lowest member at 0.5
  const auto& f4 = family.levels[3];
  CHECK(f4.p == 4);
  CHECK(f4.diameter == Catch::Approx(0.5).margin(family.resolution));
  CHECK(f4.members.front()[0] == Catch::Approx(0.5).margin(family.resolution));
  CHECK(f4.members.back()[0] == 1.0);

  double prev_size = -1;
  for (const auto& level : family.levels) {
    double expect = std::min(1.0, 2.0 / level.p);
    CHECK(level.diameter == Catch::Approx(expect).margin(family.resolution + 1e-9));
    // analytic proof bound with alpha = 1/4: 16 / (3p)
    REQUIRE(level.diameter_bound);
    CHECK(*level.diameter_bound == Catch::Approx(16.0 / (3 * level.p)).margin(1e-12));
    CHECK(level.bound_ok);
    // nested: same grid, shrinking membership
    if (prev_size >= 0) CHECK(level.members.size() <= prev_size);
    prev_size = static_cast<double>(level.members.size());
  }

  // exact nestedness on the shared grid
  for (std::size_t i = 1; i < family.levels.size(); ++i) {
    const auto& outer = family.levels[i - 1].members;
    for (const auto& x : family.levels[i].members)
      CHECK(std::binary_search(outer.begin(), outer.end(), x, lex_less));
  }
}

TEST_CASE("solve_strong requires positive distance", "[solver]") {
  auto inst = fixtures::strong_ex();
  inst.H = Region::interval(0.5, 2);  // overlaps G
  inst.map = parse_map("1");          // constant map into H
  try {
    solve_strong(inst, 8);
    FAIL("expected DistZero");
  } catch (const Error& e) {
    CHECK(e.code() == errc::dist_zero);
  }
}

TEST_CASE("estimate_rate on synthetic traces", "[solver]") {
  IterationTrace halving;
  halving.metric = {MetricKind::l1, 1};
  double x = 0;
  for (int n = 0; n <= 12; ++n) {
    halving.iterates.push_back({x});
    if (n < 12) {
      double step = std::pow(0.5, n + 1);
      halving.steps.push_back(step);
      x += step;
    }
    halving.residuals.push_back(0.0);
  }
  CHECK(estimate_rate(halving) == 0.5);

  IterationTrace constant;
  constant.metric = {MetricKind::l1, 1};
  constant.iterates = {{5}, {5}, {5}};
  constant.steps = {0, 0};
  constant.residuals = {0, 0, 0};
  try {
    estimate_rate(constant);
    FAIL("expected TooShort");
  } catch (const Error& e) {
    CHECK(e.code() == errc::too_short);
  }

  IterationTrace growing;
  growing.metric = {MetricKind::l1, 1};
  growing.iterates = {{0}, {1}, {3}, {7}, {15}};
  growing.steps = {1, 2, 4, 8};
  growing.residuals = {0, 0, 0, 0, 0};
  try {
    estimate_rate(growing);
    FAIL("expected RateGeqOne");
  } catch (const Error& e) {
    CHECK(e.code() == errc::rate_geq_one);
  }
}

TEST_CASE("solver points match an exhaustive hand-rolled grid argmin", "[solver]") {
  // coarse version of the brute-force oracle (the full-resolution run lives
  // in the acceptance suite)
  {
    auto out = solve_first_kind(fixtures::kannan_ex(), {6});
    double best_phi = 1e300, best_x = 0;
    for (double g : oracle::grid1(6, 7, 100000)) {
      double phi = std::abs(std::abs(2 * g - 9) - 3.0);
      if (phi < best_phi) {
        best_phi = phi;
        best_x = g;
      }
    }
    CHECK(std::abs(out.point[0] - best_x) <= 1e-5);
  }
  {
    auto out = solve_second_kind(fixtures::l1_second_type(), {4, 1});
    double best_phi = 1e300;
    oracle::Pt best;
    for (const auto& g : oracle::grid2(4, 5, 0, 1, 500)) {
      oracle::Pt img{1.0, g[1] / 2.0};
      double phi = std::abs(oracle::dist_l1(g, img) - 3.0);
      if (phi < best_phi) {
        best_phi = phi;
        best = g;
      }
    }
    CHECK(std::abs(out.point[0] - best[0]) <= 1.0 / 500 + 1e-9);
    CHECK(std::abs(out.point[1] - best[1]) <= 1.0 / 500 + 1e-9);
  }
}
