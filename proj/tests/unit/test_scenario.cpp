#include "doctest.h"
#include "sgm/scenario.hpp"
#include "sgm/store.hpp"

using namespace sgm;

namespace {
std::string scen(const char* f) { return std::string(SGM_SCENARIO_DIR) + "/" + f; }
}  // namespace

TEST_CASE("scenario files load") {
  auto z2 = load_scenario(scen("z2.toml"));
  CHECK(z2.name == "z2");
  CHECK(z2.cm.F->origin == "fox");
  CHECK(z2.budgets.window == 4);
  CHECK(z2.digest() == load_scenario(scen("z2.toml")).digest());
  auto b = load_scenario(scen("z2-boundary.toml"));
  CHECK(b.digest() != z2.digest());

  auto p = load_scenario(scen("f2xf2.toml"));
  REQUIRE(p.is_product());
  CHECK(p.cm.F->G->gen_names() == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(p.cm.M->kind() == "product");
  // jobs does not enter the digest
  auto q = p;
  q.jobs = 1;
  CHECK(q.digest() == p.digest());

  auto tree = load_scenario(scen("bs2-tree.toml"));
  CHECK(tree.cm.M->kind() == "tree");
}

TEST_CASE("tables resolutions and control options") {
  auto s = parse_scenario(R"(
[group]
kind = "free_abelian"
rank = 1
names = ["a"]
[model]
tau = [["1/2"]]
[resolution]
kind = "tables"
names = [["x0"], ["x_a"]]
boundaries = [["(a-1) x0"]]
eps = [1]
control = "boundary"
base = "1/3"
[budgets]
levels = [0, "1/2"]
)", ".");
  s.cm.check();
  CHECK(s.cm.base == Point{Q(1, 3)});
  CHECK(s.budgets.levels.size() == 2);
  CHECK(s.cm.h[1][0].size() == 2);
}

TEST_CASE("scenario errors are parse errors") {
  const char* bad[] = {
      "[group]\nkind = \"hyperbolic\"\n",
      "[group]\nrank = 0\n",
      "[groop]\n",
      "[budgets]\nwindow = 0\n",
      "[budgets]\nnu = \"-1\"\n",
      "[module]\nring = \"GF(4)\"\n",
      "[model]\nkind = \"tree\"\n",
      "[resolution]\ncontrol = \"sideways\"\n",
      "[group\n",
      "[model]\ntau = [[1, 0]]\n",
  };
  for (auto* t : bad) CHECK_THROWS_AS(parse_scenario(t, "."), ParseError);
}

TEST_CASE("directions from flags") {
  auto z2 = load_scenario(scen("z2.toml"));
  CHECK(parse_direction(z2, "2,4", "", "") == z2.cm.M->parse_dir("1,2"));
  CHECK_THROWS_AS(parse_direction(z2, "0,0", "", ""), ParseError);
  CHECK_THROWS_AS(parse_direction(z2, "1,0", "", "1,1"), ParseError);
  CHECK_THROWS_AS(parse_direction(z2, "", "", ""), ParseError);
  auto tree = load_scenario(scen("bs2-tree.toml"));
  CHECK(parse_direction(tree, "", "omega", "").omega);
  auto p = load_scenario(scen("zxz.toml"));
  auto j = parse_direction(p, "1;-1", "", "2,1");
  CHECK(j.kind == Dir::Kind::Join);
  CHECK_THROWS_AS(parse_direction(p, "1", "", ""), ParseError);
  CHECK(dir_slug(j).find('/') == std::string::npos);
}
