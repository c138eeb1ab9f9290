#include <catch2/catch_amalgamated.hpp>

#include <proxipoint/engine.hpp>

#include <cmath>

#include "instances.hpp"
#include "oracle.hpp"

using namespace proxipoint;

TEST_CASE("compute_proximal_pair on the interval instances", "[engine]") {
  auto pair = compute_proximal_pair(fixtures::kannan_ex());
  CHECK(pair.dist == 3.0);
  REQUIRE(pair.g0.size() == 1);
  CHECK(pair.g0[0] == Point{6});
  REQUIRE(pair.h0.size() == 1);
  CHECK(pair.h0[0] == Point{3});

  // brute-force oracle: scan a dense hand-rolled grid of [6,7] for points at
  // distance 3 from [2,3]
  {
    int hits = 0;
    for (double g : oracle::grid1(6, 7, 4000)) {
      double dmin = g - 3.0;  // distance from g >= 6 to [2,3]
      if (std::abs(dmin - 3.0) <= 1e-9) ++hits;
    }
    CHECK(hits == 1);
  }

  auto ray = compute_proximal_pair(fixtures::basha_ex1());
  CHECK(ray.dist == 3.0);
  REQUIRE(ray.g0.size() == 1);
  CHECK(ray.g0[0] == Point{2});
  REQUIRE(ray.h0.size() == 1);
  CHECK(ray.h0[0] == Point{-1});
}

TEST_CASE("compute_proximal_pair on the L1 box instance", "[engine]") {
  auto inst = fixtures::l1_second_type();
  auto pair = compute_proximal_pair(inst);
  CHECK(pair.dist == 3.0);
  REQUIRE_FALSE(pair.g0.empty());
  for (const auto& g : pair.g0) {
    CHECK(g[0] == 4.0);  // per-axis gap oracle: only the x=4 face realizes dist
    CHECK(g[1] >= 0.0);
    CHECK(g[1] <= 1.0);
  }
  // the face is covered up to the grid resolution
  CHECK(pair.g0.size() >= 2);
  CHECK(pair.g0.front()[1] == 0.0);
  CHECK(pair.g0.back()[1] == 1.0);
  for (const auto& h : pair.h0) CHECK(h[0] == 1.0);
}

TEST_CASE("compute_proximal_pair reports an empty proximal set at the floor", "[engine]") {
  // G0 = {0.3} falls between dyadic grid points, so the grid filter cannot
  // certify it at tol_feas
  ProximalInstance inst;
  inst.metric = {MetricKind::l1, 1};
  inst.G = Region::interval(0, 1);
  inst.H = Region::finite_set({{0.3}});
  inst.map = parse_map("0");
  inst.relation = parse_relation("0.5*r");
  inst.max_halvings = 10;
  CHECK_THROWS_AS(compute_proximal_pair(inst), Error);
  try {
    compute_proximal_pair(inst);
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_proximal_set);
  }
}

TEST_CASE("proximal_step solves the worked equations", "[engine]") {
  auto basha = fixtures::basha_ex1();
  auto pair = compute_proximal_pair(basha);
  // y = S(2) = -1: |u + 1| = 3 with u >= 2 forces u = 2
  Point u = proximal_step(basha, pair, {-1});
  CHECK(u == Point{2});

  auto l1 = fixtures::l1_second_type();
  auto lpair = compute_proximal_pair(l1);
  // y = (1, 0.5): L1 distance 3 forces the first coordinate to 4, second 0.5
  Point v = proximal_step(l1, lpair, {1, 0.5});
  CHECK(v == Point{4, 0.5});
}

TEST_CASE("proximal_step raises NoFeasiblePoint when the equation has no root in G",
          "[engine]") {
  auto kan = fixtures::kannan_ex();
  auto pair = compute_proximal_pair(kan);
  // |u - 2| = 3 needs u = 5, which is outside [6, 7]
  try {
    proximal_step(kan, pair, {2});
    FAIL("expected NoFeasiblePoint");
  } catch (const Error& e) {
    CHECK(e.code() == errc::no_feasible_point);
  }
}

TEST_CASE("proximal_step tie-breaks toward the previous iterate", "[engine]") {
  auto two = fixtures::two_interval();
  auto pair = compute_proximal_pair(two);
  CHECK(pair.dist == 0.5);
  Point prev_pos{0.5};
  CHECK(proximal_step(two, pair, {0}, &prev_pos) == Point{0.5});
  Point prev_neg{-0.5};
  CHECK(proximal_step(two, pair, {0}, &prev_neg) == Point{-0.5});
  // without a previous iterate, lexicographic order decides
  CHECK(proximal_step(two, pair, {0}) == Point{-0.5});
}

TEST_CASE("certify_contraction accepts the paper instances", "[engine]") {
  {
    auto inst = fixtures::basha_ex1();
    auto pair = compute_proximal_pair(inst);
    auto rep = certify_contraction(inst, pair, 2000);
    CHECK_FALSE(rep.violated);
    CHECK(rep.quadruples_checked >= 2000);
  }
  {
    auto inst = fixtures::piecewise_aprime();
    auto pair = compute_proximal_pair(inst);
    auto rep = certify_contraction(inst, pair, 2000);
    CHECK_FALSE(rep.violated);
  }
  {
    auto inst = fixtures::l1_second_type();
    auto pair = compute_proximal_pair(inst);
    auto rep = certify_contraction(inst, pair, 2000);
    CHECK_FALSE(rep.violated);
  }
  {
    auto inst = fixtures::segment_union();
    auto pair = compute_proximal_pair(inst);
    auto rep = certify_contraction(inst, pair, 2000);
    CHECK_FALSE(rep.violated);
  }
  {
    auto inst = fixtures::strong_ex();
    auto pair = compute_proximal_pair(inst);
    auto rep = certify_contraction(inst, pair, 2000);
    CHECK_FALSE(rep.violated);
    CHECK(rep.quadruples_checked >= 2000);
  }
}

TEST_CASE("certify_contraction finds violations of an undersized relation", "[engine]") {
  // d(Su1, Su2) = |y1 - y2|/4 while 0.1 * d(Sx1, Sx2) = |y1 - y2|/20
  auto inst = fixtures::l1_second_type();
  inst.relation = parse_relation("0.1*r");
  auto pair = compute_proximal_pair(inst);
  auto rep = certify_contraction(inst, pair, 5000);
  CHECK(rep.violated);
  REQUIRE_FALSE(rep.witnesses.empty());
  CHECK(rep.witnesses.size() <= 10);
  for (const auto& w : rep.witnesses) {
    CHECK(w.lhs > w.rhs + inst.tol.cert);
    // both sides recomputed from the witness agree with the report
    Point su1 = apply_map(inst, w.u1);
    Point su2 = apply_map(inst, w.u2);
    CHECK(metric_eval(inst.metric, su1, su2) == w.lhs);
  }
}

TEST_CASE("certify_contraction is deterministic and prefix-monotone", "[engine]") {
  auto inst = fixtures::l1_second_type();
  inst.relation = parse_relation("0.1*r");
  auto pair = compute_proximal_pair(inst);
  auto a = certify_contraction(inst, pair, 5000, 0xBA5E);
  auto b = certify_contraction(inst, pair, 5000, 0xBA5E);
  REQUIRE(a.witnesses.size() == b.witnesses.size());
  CHECK(a.quadruples_checked == b.quadruples_checked);
  for (std::size_t i = 0; i < a.witnesses.size(); ++i) {
    CHECK(a.witnesses[i].u1 == b.witnesses[i].u1);
    CHECK(a.witnesses[i].x1 == b.witnesses[i].x1);
    CHECK(a.witnesses[i].lhs == b.witnesses[i].lhs);
  }
  // a witness stream is a prefix of the longer run's stream
  auto longer = certify_contraction(inst, pair, 50000, 0xBA5E);
  REQUIRE(longer.witnesses.size() >= a.witnesses.size());
  for (std::size_t i = 0; i < a.witnesses.size(); ++i) {
    CHECK(a.witnesses[i].u1 == longer.witnesses[i].u1);
    CHECK(a.witnesses[i].u2 == longer.witnesses[i].u2);
  }
}

TEST_CASE("certify ratio stays under the contraction constant on basha-ex1", "[engine]") {
  // with f = alpha*r the first-kind definition reduces to d(u1,u2) <= alpha d(x1,x2)
  auto inst = fixtures::basha_ex1();
  inst.relation = parse_relation("0.75*r");
  auto pair = compute_proximal_pair(inst);
  auto rep = certify_contraction(inst, pair, 5000);
  CHECK_FALSE(rep.violated);
}

TEST_CASE("validate_instance rejects inconsistent configurations", "[engine]") {
  auto inst = fixtures::l1_second_type();
  inst.map = parse_map("5-x");  // scalar map in a 2-D instance
  try {
    validate_instance(inst);
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == errc::schema_error);
  }

  auto covered = fixtures::piecewise_aprime();
  CHECK_NOTHROW(validate_instance(covered));
  covered.map = parse_map("piece x in [3,4]: 1");  // guards do not cover [3,5]
  CHECK_THROWS_AS(validate_instance(covered), Error);
}
