#pragma once

#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace proxipoint {

/// A named, ready-to-run instance with its expected outcome. The config
/// strings are byte-identical to the files shipped under fixtures/.
struct ExampleFixture {
  std::string name;
  std::string config_json;
  std::vector<Point> expected_points;  // all best proximity points
  bool expect_multiple = false;
  std::vector<std::string> notes;  // discrepancies between the worked example
                                   // text and the derived fixture values
};

inline const std::vector<ExampleFixture>& example_registry() {
  static const std::vector<ExampleFixture> registry = {
      {"basha-ex1",
       R"({
  "metric": {"kind": "L1", "dim": 1},
  "G": {"shape": "interval", "lo": 2, "hi": "inf"},
  "H": {"shape": "interval", "lo": "-inf", "hi": -1},
  "map": "(2-3*x)/4",
  "relation": {"text": "0.75*max(r,s,t)", "class": "A"},
  "contraction_type": "first",
  "solver": {"scheme": "first", "x0": 2}
}
)",
       {{2}},
       false,
       {}},
      {"kannan-ex",
       R"({
  "metric": {"kind": "L1", "dim": 1},
  "G": {"shape": "interval", "lo": 6, "hi": 7},
  "H": {"shape": "interval", "lo": 2, "hi": 3},
  "map": "9-x",
  "relation": {"text": "(49/50)*max(s,t)", "class": "A"},
  "contraction_type": "first",
  "solver": {"scheme": "first", "x0": 6}
}
)",
       {{6}},
       false,
       {}},
      {"piecewise-Aprime",
       R"({
  "metric": {"kind": "L1", "dim": 1},
  "G": {"shape": "interval", "lo": 3, "hi": 5},
  "H": {"shape": "interval", "lo": 0, "hi": 1},
  "map": "piece x in [3,4]: 1; piece x in [4,5]: 5-x",
  "relation": {"text": "(1/3)*(s+t)", "class": "Aprime"},
  "contraction_type": "first",
  "solver": {"scheme": "first", "x0": 3}
}
)",
       {{3}},
       false,
       {}},
      {"l1-second-type",
       R"({
  "metric": {"kind": "L1", "dim": 2},
  "G": {"shape": "box", "axes": [[4, 5], [0, 1]]},
  "H": {"shape": "box", "axes": [[0, 1], [0, 1]]},
  "map": "(1, y/2)",
  "relation": {"text": "(1/2)*r+(1/5)*(s+t)", "class": "A"},
  "contraction_type": "second",
  "solver": {"scheme": "second", "x0": [4, 1]}
}
)",
       {{4, 0}},
       false,
       {}},
      {"segment-union",
       R"({
  "metric": {"kind": "L1", "dim": 2},
  "G": {"shape": "union", "parts": [
    {"shape": "segment", "a": [2, 0], "b": [2, 3]},
    {"shape": "segment", "a": [0, 2], "b": [2, 2]}
  ]},
  "H": {"shape": "box", "axes": [[0, 1], [0, 1]]},
  "map": "(x/2, 0)",
  "relation": {"text": "(1/4)*(s+t)", "class": "Aprime"},
  "contraction_type": "second",
  "solver": {"scheme": "second", "x0": [2, 1]}
}
)",
       {{2, 0}},
       false,
       {"the worked example prints the best proximity point as (4, 0), which lies "
        "outside its own G; exhaustive scanning gives (2, 0), which this fixture "
        "expects",
        "points of G0 on the y=2 arm have images outside H0, so proximal steps "
        "starting there raise NoFeasiblePoint; the shipped start point stays on "
        "the x=2 arm"}},
      {"two-interval",
       R"({
  "metric": {"kind": "L1", "dim": 1},
  "G": {"shape": "union", "parts": [
    {"shape": "interval", "lo": -1, "hi": -0.5},
    {"shape": "interval", "lo": 0.5, "hi": 1}
  ]},
  "H": {"shape": "finite_set", "points": [[0]]},
  "map": "0",
  "relation": {"name": "basha", "params": {"alpha": 0.5}, "class": "A"},
  "contraction_type": "second",
  "solver": {"scheme": "second", "x0": 0.5}
}
)",
       {{-0.5}, {0.5}},
       true,
       {"the worked example writes the positive interval reversed; the fixture "
        "reads it as [1/2, 1], the only reading under which two best proximity "
        "points exist",
        "the worked example names no relation f; the fixture uses basha(alpha=1/2), "
        "admissible because every feasible quadruple has d(Su1, Su2) = 0"}},
      {"strong-ex",
       R"({
  "metric": {"kind": "L1", "dim": 1},
  "G": {"shape": "interval", "lo": 0, "hi": 1},
  "H": {"shape": "interval", "lo": 5, "hi": 6},
  "map": "6-x",
  "relation": {"text": "(1/4)*(r+s+t)", "class": "A"},
  "contraction_type": "strong",
  "solver": {"scheme": "strong", "p_max": 64}
}
)",
       {{1}},
       false,
       {"the worked example's slack term names two undefined sets; the fixture "
        "reads it as (gamma - 1) * dist(G, H)"}},
  };
  return registry;
}

inline const ExampleFixture& find_example(const std::string& name) {
  for (const auto& fx : example_registry())
    if (fx.name == name) return fx;
  fail(errc::unknown_example, "no example named '" + name + "' (see list-examples)");
}

}  // namespace proxipoint
