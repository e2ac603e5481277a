#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "sgm/gen.hpp"

using namespace sgm;

TEST_CASE("normal forms") {
  auto Z2 = Group::free_abelian(2);
  CHECK(Z2->is_id(Z2->parse("a b a^-1 b^-1")));
  auto BS = Group::baumslag_solitar(2);
  CHECK(BS->parse("t a t⁻¹") == BS->parse("a^2"));
  CHECK(BS->mul(BS->parse("t"), BS->parse("a")) == BS->parse("a^2 t"));
  auto F2 = Group::free_group(2);
  CHECK(F2->parse("a a^-1 b") == F2->parse("b"));
  CHECK(F2->format(F2->parse("a a^-1 b")) == "b");
  auto Z1 = Group::free_abelian(1);
  CHECK(Z1->mul(Z1->gen(0, 3), Z1->gen(0, 4)) == Z1->gen(0, 7));
  CHECK_THROWS_AS(F2->parse("a z"), Error);
}

TEST_CASE("BS normal form is unique") {
  auto G = Group::baumslag_solitar(2);
  // t^-1 itself and a t^-1 a^-2 t = a^0 ... spot checks
  CHECK(G->parse("t^-1 a^2 t") == G->parse("a"));
  CHECK(G->parse("t^-1 a t a^-1") != G->id());
  CHECK(G->inv(G->parse("t")) == G->parse("t^-1"));
  for (auto& e : {"t^-1", "t^-1 a", "a t^-2 a t", "t a t^-1 a^-2"}) {
    Elem x = G->parse(e);
    CHECK(G->parse(G->format(x)) == x);
  }
}

TEST_CASE("property: normal_form(uv) = mul(nf u, nf v)") {
  gen::Rng R(11);
  for (auto& G : gen::backends())
    for (int i = 0; i < 1000; ++i) {
      Word u = gen::word(R, *G, 5), v = gen::word(R, *G, 5);
      Word uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      REQUIRE(G->normal_form(uv) == G->mul(G->normal_form(u), G->normal_form(v)));
      Elem x = G->normal_form(u);
      REQUIRE(G->is_id(G->mul(x, G->inv(x))));
    }
}

TEST_CASE("group ring examples") {
  auto Z = Group::free_abelian(1);
  GroupRing A(Z, Ring::rationals());
  CHECK(A.mul(A.parse("a - 1"), A.parse("a + 1")) == A.parse("a^2 - 1"));
  CHECK(A.add(A.parse("a - 1"), A.parse("1 - a")).zero());
  GroupRing B(Group::free_abelian(2), Ring::rationals());
  CHECK(B.mul(B.parse("1 + a"), B.parse("1 + b")).t.size() == 4);
  CHECK(B.support(B.zero()).empty());
  CHECK(B.support(B.parse("3 a - b")).size() == 2);
  auto sq = A.mul(A.parse("a - 1"), A.parse("a - 1"));
  CHECK(sq == A.parse("a^2 - 2 a + 1"));
  CHECK(A.support(sq).size() == 3);
}

TEST_CASE("property: ring axioms and right translation of support") {
  gen::Rng R(12);
  std::vector<Ring> rings{Ring::integers(), Ring::rationals(), Ring::prime(5)};
  for (auto& G : gen::backends())
    for (auto& K : rings) {
      GroupRing A(G, K);
      for (int i = 0; i < 1000; ++i) {
        auto u = gen::gr(R, A), v = gen::gr(R, A), w = gen::gr(R, A);
        REQUIRE(A.mul(A.mul(u, v), w) == A.mul(u, A.mul(v, w)));
        REQUIRE(A.mul(u, A.add(v, w)) == A.add(A.mul(u, v), A.mul(u, w)));
        REQUIRE(A.mul(A.add(u, v), w) == A.add(A.mul(u, w), A.mul(v, w)));
        REQUIRE(A.mul(u, A.one()) == u);
        Elem g = gen::elem(R, *G);
        std::set<Elem> shifted;
        for (auto& x : A.support(u)) shifted.insert(G->mul(x, g));
        REQUIRE(A.support(A.mul(u, g)) == shifted);
      }
    }
}

TEST_CASE("ground rings") {
  auto F5 = Ring::prime(5);
  CHECK(F5.norm(Scalar(-1)) == 4);
  CHECK(F5.norm(F5.inv(Scalar(2)) * 2) == 1);
  CHECK_FALSE(Ring::integers().is_unit(Scalar(2)));
  CHECK(Ring::parse("GF(7)").p == 7);
}

TEST_CASE("fox resolutions") {
  auto F2 = fox_resolution(standard_presentation(Group::free_group(2)));
  CHECK(F2->format(F2->bd[1][0]) == F2->format(F2->parse_chain(0, "(a - 1) x0")));
  CHECK(F2->rank(2) == 0);

  auto Z2 = fox_resolution(standard_presentation(Group::free_abelian(2)));
  CHECK(Z2->bd[2][0] == Z2->parse_chain(1, "(1 - b) x_a + (a - 1) x_b"));
  CHECK(is_admissible(*Z2).ok);

  auto BS = fox_resolution(standard_presentation(Group::baumslag_solitar(2)));
  CHECK(BS->bd[2][0] == BS->parse_chain(1, "(t - 1 - a) x_a + (1 - a^2) x_t"));
  CHECK_NOTHROW(BS->validate());
}

TEST_CASE("koszul agrees with fox on Z^2 and tensor ranks") {
  auto G = Group::free_abelian(2);
  auto K = koszul_resolution(G, Ring::rationals());
  auto F = fox_resolution(standard_presentation(G));
  CHECK(K->bd[2][0] == F->bd[2][0]);
  auto Z = standard_resolution(Group::free_abelian(1));
  auto T = tensor_complex(*Z, *standard_resolution(Group::free_abelian(1, {"b"})));
  CHECK(T->rank(0) == 1);
  CHECK(T->rank(1) == 2);
  CHECK(T->rank(2) == 1);
  auto Z3 = koszul_resolution(Group::free_abelian(3), Ring::rationals());
  CHECK(Z3->rank(3) == 1);
  CHECK_NOTHROW(Z3->validate());
  auto F2 = standard_resolution(Group::free_group(2));
  auto T2 = tensor_complex(*F2, *standard_resolution(Group::free_group(2, {"c", "d"})));
  for (int n = 0; n <= T2->top(); ++n) {
    int s = 0;
    for (int p = 0; p <= n; ++p) s += F2->rank(p) * F2->rank(n - p);
    CHECK(T2->rank(n) == s);
  }
}

TEST_CASE("koszul sign on x ⊗ x'") {
  auto Z = standard_resolution(Group::free_abelian(1));
  auto Zb = standard_resolution(Group::free_abelian(1, {"b"}));
  auto T = tensor_complex(*Z, *Zb);
  // x_a ⊗ x_b: ∂ = (a-1) x0⊗x_b - (b-1) x_a⊗x0
  Chain want = T->parse_chain(1, "(a - 1) x0⊗x_b - (b - 1) x_a⊗x0");
  CHECK(T->bd[2][0] == want);
  CHECK(T->eps[0][0] == 1);
}

TEST_CASE("resolution_from_tables validation") {
  auto G = Group::free_abelian(2);
  auto F = fox_resolution(standard_presentation(G));
  auto R = resolution_from_tables(G, F->K, F->names, F->bd, F->eps);
  CHECK(complex_to_json(*R)["boundary"] == complex_to_json(*F)["boundary"]);
  auto bad = F->bd;
  bad[2][0] = F->parse_chain(0, "x0");  // wrong dimension
  CHECK_THROWS_AS(resolution_from_tables(G, F->K, F->names, bad, F->eps), Error);
  auto bad2 = F->bd;
  bad2[2][0] = F->parse_chain(1, "x_a");  // ∂∂ != 0
  CHECK_THROWS_AS(resolution_from_tables(G, F->K, F->names, bad2, F->eps), Error);
  auto triv = resolution_from_tables(Group::free_abelian(1), F->K, {{"x0"}}, {{}}, {AVec{Scalar(1)}});
  CHECK(triv->rank(0) == 1);
}

TEST_CASE("admissibility") {
  auto G = Group::free_abelian(1);
  auto K = Ring::rationals();
  std::vector<std::vector<std::string>> names{{"x0"}, {"x", "y"}};
  Chain zero;
  zero.dim = 0;
  Chain ay;
  ay.dim = 0;
  ay.t[Cell{0, G->gen(0)}] = 1;
  ay.t[Cell{0, G->id()}] = -1;
  auto F = resolution_from_tables(G, K, names, {{}, {zero, ay}}, {AVec{Scalar(1)}});
  auto a = is_admissible(*F);
  CHECK_FALSE(a.ok);
  REQUIRE(a.offending.size() == 1);
  CHECK(a.offending[0] == std::pair<int, int>{1, 0});
  auto Fa = make_admissible(*F);
  CHECK(is_admissible(*Fa).ok);
  CHECK(Fa->bd[1][0] == ay);  // x -> x + y

  auto lone = resolution_from_tables(G, K, {{"x0"}, {"x"}}, {{}, {zero}}, {AVec{Scalar(1)}});
  auto La = make_admissible(*lone);
  CHECK(La->rank(1) == 0);
  auto Z2 = fox_resolution(standard_presentation(Group::free_abelian(2)));
  CHECK(complex_to_json(*make_admissible(*Z2)) == complex_to_json(*Z2));
}

TEST_CASE("elementary expansion") {
  auto F = fox_resolution(standard_presentation(Group::free_abelian(2)));
  Chain x = F->basis(0, 0);
  Chain c = F->basis(0, 0, F->G->parse("a"));
  Chain d = F->scale(F->basis(1, 0), -1);  // ∂(-x_a) = x0 - a x0
  auto ex = elementary_expansion(*F, x, c, d);
  CHECK(ex.F->bd[1][ex.xi] == F->parse_chain(0, "x0 - a x0"));
  CHECK(ex.F->bd[2][ex.eta] == ex.F->parse_chain(1, "- x_a - xi2"));
  CHECK_NOTHROW(ex.F->validate());
  // the literal d = x_a has ∂d = a x0 - x0 = c - x
  CHECK_THROWS_AS(elementary_expansion(*F, x, c, F->basis(1, 0)), Error);
  Chain empty;
  CHECK_THROWS_AS(elementary_expansion(*F, x, x, empty), Error);
}

TEST_CASE("property: ∂∂ = 0 on random chains") {
  gen::Rng R(13);
  for (auto& G : gen::backends()) {
    auto F = standard_resolution(G);
    for (int k = 2; k <= F->top(); ++k)
      for (int i = 0; i < 200; ++i) {
        Chain c = gen::chain(R, *F, k);
        REQUIRE(F->boundary(F->boundary(c)).zero());
      }
    for (int i = 0; i < 200; ++i) {
      Chain c = gen::chain(R, *F, 1);
      auto e = F->augment(F->boundary(c));
      REQUIRE(e[0] == 0);
    }
  }
}

TEST_CASE("complex json round trip") {
  for (auto& G : gen::backends()) {
    auto F = standard_resolution(G);
    auto j = complex_to_json(*F);
    auto F2 = complex_from_json(json::parse(j.dump()));
    CHECK(complex_to_json(*F2) == j);
  }
}
