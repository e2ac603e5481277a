#include "doctest.h"
#include "sgm/gen.hpp"
#include "sgm/finitary.hpp"

using namespace sgm;

namespace {

struct Z2 {
  ModelPtr M = std::make_shared<EuclideanModel>(Group::free_abelian(2), std::vector<std::vector<Q>>{{1, 0}, {0, 1}});
  ComplexPtr F = standard_resolution(M->G);
  ControlledModel cm = ControlledModel::standard(M, F);
  Elem g(const char* s) const { return M->G->parse(s); }
};

FinitaryMap random_map(gen::Rng& R, ComplexPtr F, int hi) {
  FinitaryMap f = FinitaryMap::zero(F, F, 0, hi);
  for (int k = 0; k <= f.hi(); ++k)
    for (auto& c : f.table[k]) {
      do c = gen::chain(R, *F, k, 2, 2);
      while (c.zero());
    }
  return f;
}

}  // namespace

TEST_CASE("volley composition") {
  Z2 z;
  Volley Phi = Volley::identity(z.F, 0);
  Phi.table[0][0].push_back(z.F->basis(0, 0, z.g("a")));
  Volley Psi = Volley::identity(z.F, 0);
  Psi.table[0][0] = {z.F->scale(z.F->basis(0, 0), 2)};
  auto C = compose_volleys(Psi, Phi);
  REQUIRE(C.table[0][0].size() == 2);
  CHECK(C.table[0][0][0] == z.F->scale(z.F->basis(0, 0), 2));
  CHECK(C.table[0][0][1] == z.F->scale(z.F->basis(0, 0, z.g("a")), 2));
  auto I = compose_volleys(Volley::identity(z.F, 0), Phi);
  CHECK(I.table[0][0] == Phi.table[0][0]);
  // singletons compose as maps
  auto fa = FinitaryMap::right_mult(z.F, z.g("a"), 2), fb = FinitaryMap::right_mult(z.F, z.g("b"), 2);
  auto S = compose_volleys(Volley::singleton(fb), Volley::singleton(fa));
  auto ab = compose(fb, fa);
  for (int k = 0; k <= 2; ++k)
    for (size_t i = 0; i < S.table[k].size(); ++i) CHECK(S.table[k][i] == std::vector<Chain>{ab.table[k][i]});
}

TEST_CASE("property: composite of selections is a selection of the composed volley") {
  gen::Rng R(31);
  Z2 z;
  for (int it = 0; it < 50; ++it) {
    Volley Phi = Volley::identity(z.F, 1), Psi = Volley::identity(z.F, 1);
    for (auto* V : {&Phi, &Psi})
      for (int k = 0; k <= 1; ++k)
        for (auto& s : V->table[k]) s.push_back(gen::chain(R, *z.F, k, 2, 2));
    FinitaryMap phi = FinitaryMap::zero(z.F, z.F, 0, 1), psi = phi;
    for (int k = 0; k <= 1; ++k)
      for (int i = 0; i < z.F->rank(k); ++i) {
        phi.table[k][i] = Phi.table[k][i][R.range(0, 1)];
        psi.table[k][i] = Psi.table[k][i][R.range(0, 1)];
      }
    auto C = compose_volleys(Psi, Phi);
    auto c = compose(psi, phi);
    for (int k = 0; k <= 1; ++k)
      for (int i = 0; i < z.F->rank(k); ++i) {
        auto& opts = C.table[k][i];
        bool found = false;
        for (auto& o : opts) found |= o.t == c.table[k][i].t;
        REQUIRE(found);
      }
  }
}

TEST_CASE("norms") {
  Z2 z;
  CHECK(norm2(z.cm, z.cm, FinitaryMap::identity(z.F, 2)) == 0);
  CHECK(norm2(z.cm, z.cm, FinitaryMap::right_mult(z.F, z.g("a"), 2)) == 1);
  Volley V = Volley::identity(z.F, 0);
  V.table[0][0].push_back(z.F->basis(0, 0, z.g("a")));
  CHECK(norm2(z.cm, z.cm, V) == 1);
}

TEST_CASE("shifts toward directions") {
  Z2 z;
  Dir e = z.M->parse_dir("1,0");
  Window w{2, {}};
  auto id = shift_report(z.cm, z.cm, e, FinitaryMap::identity(z.F, 2), w);
  CHECK(id.exact);
  CHECK(*id.gsh == 0);
  auto ra = shift_report(z.cm, z.cm, e, FinitaryMap::right_mult(z.F, z.g("a"), 2), w);
  CHECK(ra.exact);
  CHECK(*ra.gsh == 1);
  auto rb = shift_report(z.cm, z.cm, e, FinitaryMap::right_mult(z.F, z.g("b"), 2), w);
  CHECK(*rb.gsh == 0);
  auto a3 = iterate(FinitaryMap::right_mult(z.F, z.g("a"), 2), 3);
  CHECK(*shift_report(z.cm, z.cm, e, a3, w).gsh == 3);
  auto a1 = iterate(FinitaryMap::right_mult(z.F, z.g("a"), 2), 1);
  CHECK(a1.table == FinitaryMap::right_mult(z.F, z.g("a"), 2).table);
  auto a0 = iterate(FinitaryMap::right_mult(z.F, z.g("a"), 2), 0);
  CHECK(*shift_report(z.cm, z.cm, e, a0, w).gsh == 0);
}

TEST_CASE("shifts toward points") {
  auto M = std::make_shared<EuclideanModel>(Group::free_abelian(1), std::vector<std::vector<Q>>{{1}});
  auto F = standard_resolution(M->G);
  auto cm = ControlledModel::standard(M, F);
  Window w{6, {}};
  Point b = M->origin();
  auto id = gsh_point(cm, cm, b, FinitaryMap::identity(F, 1), w, 0, 0);
  CHECK(*id.gsh == 0);
  // a^k x -> a^{k-1} x (k > 0), a^{k+1} x (k < 0), x -> x
  FinitaryMap s = FinitaryMap::identity(F, 0);
  for (int64_t k = -8; k <= 8; ++k) {
    if (k == 0) continue;
    s.overrides[{0, Cell{0, M->G->gen(0, k)}}] = F->basis(0, 0, M->G->gen(0, k > 0 ? k - 1 : k + 1));
  }
  s.valid_on = w;
  auto sr = gsh_point(cm, cm, b, s, w, 0, 0);
  CHECK(*sr.gsh == 1);
  CHECK(*sr.event_radius2 == 0);
  auto ma = gsh_point(cm, cm, b, FinitaryMap::right_mult(F, M->G->gen(0), 1), w, 0, 0);
  CHECK(*ma.gsh <= 0);
}

TEST_CASE("lifts and homotopies") {
  Z2 z;
  Chooser ch;
  auto id = lift_finitary(z.F, z.F, ch);
  CHECK(id.table == FinitaryMap::identity(z.F, 2).table);

  // Fox complex of <a,b | [a,b]> against F(Z) ⊗ F(Z), both over Z x Z as a direct product
  auto A = Group::free_abelian(1), B = Group::free_abelian(1, {"b"});
  auto T = tensor_complex(*standard_resolution(A), *standard_resolution(B));
  Presentation p;
  p.G = T->G;
  p.relators = {{{0, 1}, {1, 1}, {0, -1}, {1, -1}}};
  auto Fx = fox_resolution(p);
  auto f = lift_finitary(Fx, T, ch, {4, 0, 2});
  auto g = lift_finitary(T, Fx, ch, {4, 0, 2});
  CHECK(is_chain_map(f));
  CHECK(lifts_identity(g));
  auto gf = compose(g, f);
  auto s = homotopy_between(gf, FinitaryMap::identity(Fx, 2), ch, {4, 0, 1});
  CHECK(verify_homotopy(gf, FinitaryMap::identity(Fx, 2), s));

  auto ra = FinitaryMap::right_mult(z.F, z.g("a"), 2);
  auto sig = homotopy_between(ra, FinitaryMap::identity(z.F, 2), ch, {4, 0, 1});
  CHECK(sig.table[0][0] == z.F->basis(1, 0));  // σ₀(x₀) = x_a
  auto zero = homotopy_between(ra, ra, ch, {4, 0, 1});
  for (auto& row : zero.table)
    for (auto& c : row) CHECK(c.zero());
  auto twice = FinitaryMap::identity(z.F, 2);
  twice.table[0][0] = z.F->scale(z.F->basis(0, 0), 2);
  CHECK_THROWS_AS(homotopy_between(twice, FinitaryMap::identity(z.F, 2), ch, {4, 0, 1}), Error);

  auto G = Group::free_abelian(1);
  Chain zc;
  zc.dim = 0;
  auto bad = resolution_from_tables(G, Ring::rationals(), {{"x0"}, {"x"}}, {{}, {zc}}, {AVec{Scalar(1)}});
  CHECK_THROWS_AS(lift_finitary(bad, bad, ch), Error);
}

TEST_CASE("property: per-cell shifts are at least -‖φ‖") {
  gen::Rng R(32);
  Z2 z;
  auto dirs = sample_directions(*z.M, 6);
  for (int it = 0; it < 200; ++it) {
    auto f = random_map(R, z.F, 2);
    Q n2 = norm2(z.cm, z.cm, f);
    for (auto& e : dirs) {
      auto rep = shift_report(z.cm, z.cm, e, f, {1, {}});
      for (auto& row : rep.per_cell)
        for (auto& v : row)
          if (v && *v < 0) REQUIRE(*v * *v <= n2 * z.M->scale2(e));
    }
  }
}

TEST_CASE("property: gsh of translates on the tree") {
  gen::Rng R(33);
  auto T = std::make_shared<TreeModel>(Group::baumslag_solitar(2));
  auto F = standard_resolution(T->G);
  auto cm = ControlledModel::standard(T, F);
  auto dirs = sample_directions(*T, 6);
  for (int it = 0; it < 100; ++it) {
    auto f = random_map(R, F, 1);
    for (int o = 0; o < 3; ++o) {
      int k = static_cast<int>(R.range(0, 1));
      Cell y{static_cast<int>(R.range(0, F->rank(k) - 1)), gen::elem(R, *T->G, 2)};
      f.overrides[{k, y}] = gen::chain(R, *F, k, 2, 2);
      f.overrides[{k, y}].dim = k;
    }
    Elem g = gen::elem(R, *T->G, 3);
    const Dir& e = dirs[it % dirs.size()];
    Window w{1, {}};
    auto a = shift_report(cm, cm, e, f, w);
    Window gw{1, g};
    auto b = shift_report(cm, cm, T->act_dir(g, e), translate_map(g, f), gw);
    REQUIRE(a.gsh == b.gsh);
  }
}

TEST_CASE("property: superadditivity of gsh") {
  gen::Rng R(34);
  Z2 z;
  auto dirs = sample_directions(*z.M, 6);
  for (int it = 0; it < 200; ++it) {
    auto f = random_map(R, z.F, 2), g = random_map(R, z.F, 2);
    const Dir& e = dirs[it % dirs.size()];
    Window w{1, {}};
    auto a = shift_report(z.cm, z.cm, e, f, w), b = shift_report(z.cm, z.cm, e, g, w);
    auto c = shift_report(z.cm, z.cm, e, compose(f, g), w);
    REQUIRE(c.exact);
    if (a.gsh && b.gsh) REQUIRE_FALSE(val_less(c.gsh, Val(*a.gsh + *b.gsh)));
  }
}

TEST_CASE("limit pushes") {
  Z2 z;
  auto ra = FinitaryMap::right_mult(z.F, z.g("a"), 2);
  Dir e = z.M->parse_dir("1,0");
  auto lp = push_at_limit(z.cm, ra, e, e, 1, {2, {}});
  CHECK(lp.psi.table == ra.table);

  auto T = std::make_shared<TreeModel>(Group::baumslag_solitar(2));
  auto F = standard_resolution(T->G);
  auto cm = ControlledModel::standard(T, F);
  // t^-1 x₀ on X₀ pushes toward ω
  auto tinv = FinitaryMap::right_mult(F, T->G->parse("t^-1"), 0);
  auto rep = shift_report(cm, cm, Dir::end_omega(), tinv, {2, {}});
  CHECK(rep.exact);
  CHECK(*rep.gsh == 1);
  auto lp2 = push_at_limit(cm, tinv, Dir::end_omega(), Dir::end_omega(), 1, {2, {}});
  CHECK(*lp2.report.gsh >= Q(1, 2));
}

TEST_CASE("map json round trip") {
  Z2 z;
  auto f = FinitaryMap::right_mult(z.F, z.g("a b^-1"), 2);
  f.overrides[{0, Cell{0, z.g("b")}}] = z.F->basis(0, 0);
  f.valid_on = Window{2, z.g("a")};
  auto g = FinitaryMap::from_json(z.F, z.F, json::parse(f.to_json().dump()));
  CHECK(g.to_json() == f.to_json());
}

TEST_CASE("square roots") {
  CHECK(sqrt_diff(13, 4) > Q(16, 10));
  CHECK(sqrt_diff(9, 4) == 1);
  CHECK(*exact_sqrt(Q(9, 4)) == Q(3, 2));
  CHECK(sqrt_upper(2) * sqrt_upper(2) >= 2);
  CHECK(sqrt_upper(2) < Q(1415, 1000));
}
