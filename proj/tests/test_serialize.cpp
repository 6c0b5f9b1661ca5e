#include <doctest.h>

#include <cmath>
#include <sstream>

#include "core/dyson.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/serialize.hpp"

using namespace airylab;

TEST_CASE("format_double round-trips exactly") {
  for (double v : {1.0 / 3.0, -0.0, 1e-17, 2.0 * M_PI, -123.456e77, 0.1, 5e-324}) {
    std::string s = format_double(v);
    double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
}

TEST_CASE("ensemble csv round trip preserves grid and values") {
  RngStream rng(1, 0);
  GridSpec grid{0.25, 1.75, 12};
  LineEnsemble melon = sample_melon(3, grid, 2.0, rng);
  std::ostringstream ss;
  write_ensemble_csv(melon, ss);
  std::istringstream in(ss.str());
  LineEnsemble back = read_ensemble_csv(in, 2.0);
  REQUIRE(back.line_count() == melon.line_count());
  CHECK(back.grid == melon.grid);
  for (int i = 0; i < melon.line_count(); ++i)
    for (int j = 0; j < grid.size(); ++j) CHECK(back.value(i, j) == melon.value(i, j));
  // serializing the parsed ensemble reproduces identical bytes
  std::ostringstream ss2;
  write_ensemble_csv(back, ss2);
  CHECK(ss.str() == ss2.str());
}

TEST_CASE("csv header and shape are validated") {
  std::istringstream bad_header("index,time,value\n1,0,0\n");
  CHECK_THROWS_AS(read_ensemble_csv(bad_header), ConfigError);
  std::istringstream ragged("line_index,time,value\n1,0,0\n1,1,0\n2,0,0\n");
  CHECK_THROWS_AS(read_ensemble_csv(ragged), ConfigError);
  std::istringstream mismatched("line_index,time,value\n1,0,0\n1,1,0\n2,0,0\n2,0.5,0\n");
  CHECK_THROWS_AS(read_ensemble_csv(mismatched), ConfigError);
  std::istringstream empty("line_index,time,value\n");
  CHECK_THROWS_AS(read_ensemble_csv(empty), ConfigError);
}

TEST_CASE("jam graph json schema") {
  JamGraph g;
  g.k = 3;
  g.ell = 2;
  g.delta = 0.25;
  g.edges = {{1, 1}, {2, 2}};
  nlohmann::json j = jam_graph_to_json(g);
  CHECK(j.at("format_version") == 1);
  CHECK(j.at("edges").size() == 2);
  JamGraph back = jam_graph_from_json(j);
  CHECK(back.k == 3);
  CHECK(back.ell == 2);
  CHECK(back.delta == 0.25);
  CHECK(back.edges == g.edges);
}

TEST_CASE("grid and ensemble invariants are validated") {
  CHECK_THROWS_AS(GridSpec({1.0, 0.5, 4}).validate(), ConfigError);
  CHECK_THROWS_AS(GridSpec({0.0, 1.0, 0}).validate(), ConfigError);
  Path p;
  p.grid = GridSpec{0.0, 1.0, 2};
  p.values = {0.0, 1.0};  // wrong length
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.values = {0.0, std::nan(""), 1.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);

  LineEnsemble e;
  e.grid = GridSpec{0.0, 1.0, 1};
  e.ordered = true;
  e.lines.resize(2);
  e.lines[0].grid = e.grid;
  e.lines[0].values = {0.0, 0.0};
  e.lines[1].grid = e.grid;
  e.lines[1].values = {1.0, -1.0};
  CHECK_THROWS_AS(e.validate(), ConfigError);
  CHECK_FALSE(e.is_ordered(false));
}

TEST_CASE("rebase_grid swaps in an equivalent grid and rejects others") {
  LineEnsemble e;
  e.grid = GridSpec{0.0, 1.0 + 1e-13, 4};
  e.lines.resize(1);
  e.lines[0].grid = e.grid;
  e.lines[0].values.assign(5, 0.0);
  GridSpec target{0.0, 1.0, 4};
  rebase_grid(e, target);
  CHECK(e.grid == target);
  CHECK(e.lines[0].grid == target);
  CHECK_THROWS_AS(rebase_grid(e, GridSpec{0.0, 2.0, 4}), ConfigError);
  CHECK_THROWS_AS(rebase_grid(e, GridSpec{0.0, 1.0, 8}), ConfigError);
}
