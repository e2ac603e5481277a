#include "sgm/properties.hpp"

#include "sgm/gen.hpp"

namespace sgm {

namespace {

ModelPtr euclid(GroupPtr G, std::vector<std::vector<Q>> tau) {
  return std::make_shared<EuclideanModel>(std::move(G), std::move(tau));
}

struct Family {
  std::string name;
  ModelPtr M;
  ComplexPtr F;
};

std::vector<Family> families() {
  auto z1 = euclid(Group::free_abelian(1), {{1}});
  auto z2 = euclid(Group::free_abelian(2), {{1, 0}, {0, 1}});
  auto tree = std::make_shared<TreeModel>(Group::baumslag_solitar(2));
  auto zb = euclid(Group::free_abelian(1, {"b"}), {{1}});
  auto T = tensor_complex(*standard_resolution(z1->G), *standard_resolution(zb->G));
  auto prod = model_from_json(T->G, ProductModel(z1, zb).to_json());
  return {{"euclidean(1)", z1, standard_resolution(z1->G)},
          {"euclidean(2)", z2, standard_resolution(z2->G)},
          {"bs(1,2) tree", tree, standard_resolution(tree->G)},
          {"Z^2 product", prod, T}};
}

FinitaryMap random_map(gen::Rng& R, ComplexPtr F, int hi) {
  FinitaryMap f = FinitaryMap::zero(F, F, 0, hi);
  for (int k = 0; k <= f.hi(); ++k)
    for (auto& c : f.table[k]) {
      do c = gen::chain(R, *F, k, 2, 2);
      while (c.zero());
    }
  return f;
}

// √A ≤ √B + √N, exactly
bool sqrt_le_sum(const Q& A, const Q& B, const Q& N) {
  Q t = A - B - N;
  return t <= 0 || t * t <= 4 * B * N;
}

Q exact_root(const Q& A) {
  auto r = exact_sqrt(A);
  if (!r) throw Error("tree distance is not an integer");
  return *r;
}

// id + ∂h + h∂ for a random equivariant h of degree 1
FinitaryMap random_lift(gen::Rng& R, ComplexPtr F) {
  int top = F->top();
  FinitaryMap h = FinitaryMap::zero(F, F, 1, top - 1);
  for (int k = 0; k < top; ++k)
    for (auto& c : h.table[k]) {
      c = gen::chain(R, *F, k + 1, 2, 1);
      c.dim = k + 1;
    }
  FinitaryMap phi = FinitaryMap::identity(F, top);
  for (int k = 0; k <= top; ++k)
    for (int x = 0; x < F->rank(k); ++x) {
      Chain cx = F->basis(k, x);
      if (k < top) F->add_to(phi.table[k][x], F->boundary(h.apply(cx)));
      if (k >= 1) F->add_to(phi.table[k][x], h.apply(F->boundary(cx)));
      phi.table[k][x].dim = k;
    }
  return phi;
}

}  // namespace

std::vector<PropertyReport> valuation_laws(size_t per_family, uint64_t seed) {
  gen::Rng R(seed);
  std::vector<PropertyReport> out;
  for (auto& fam : families()) {
    PropertyReport rep;
    rep.name = "valuation laws on " + fam.name;
    auto dirs = sample_directions(*fam.M, 6, seed);
    std::vector<ControlledModel> cms{ControlledModel::standard(fam.M, fam.F),
                                     ControlledModel::boundary_preset(fam.M, fam.F)};
    for (size_t i = 0; i < per_family; ++i) {
      const auto& cm = cms[i % 2];
      const auto& F = *fam.F;
      const Dir& e = dirs[i % dirs.size()];
      int k = static_cast<int>(R.range(0, F.top()));
      Chain c = gen::chain(R, F, k), d = gen::chain(R, F, k);
      ++rep.cases;
      auto vc = cm.valuation(e, c), vd = cm.valuation(e, d);
      std::string where = " (" + e.str() + ", " + F.format(c) + ")";
      if (cm.valuation(e, F.scale(c, -1)) != vc) rep.fail("v(-c) ≠ v(c)" + where);
      auto vs = cm.valuation(e, F.add(c, d));
      if (val_less(vs, val_less(vc, vd) ? vc : vd)) rep.fail("v(c+d) < min" + where);
      Elem g = gen::elem(R, *fam.M->G);
      Dir ge = fam.M->act_dir(g, e);
      auto vg = cm.valuation(ge, F.translate(g, c));
      Q shift = fam.M->busemann_delta(ge, fam.M->act(g, cm.base), cm.base);
      if (vc.has_value() != vg.has_value() || (vc && *vg != *vc + shift)) rep.fail("equivariance" + where);
      if (vc && vd) {
        Q diff = *vc - *vd;
        if (diff * diff > hausdorff2(*fam.M, cm.points(c), cm.points(d)) * fam.M->scale2(e))
          rep.fail("|v(c) - v(d)| > d_H" + where);
      }
    }
    out.push_back(rep);
  }
  return out;
}

std::vector<PropertyReport> shift_laws(size_t count, uint64_t seed) {
  gen::Rng R(seed);
  std::vector<PropertyReport> out;
  auto z2 = euclid(Group::free_abelian(2), {{1, 0}, {0, 1}});
  auto F = standard_resolution(z2->G);
  auto cm = ControlledModel::standard(z2, F);
  auto dirs = sample_directions(*z2, 6, seed);
  Window w1{1, {}};

  PropertyReport lower{"sh ≥ -‖φ‖"};
  for (size_t it = 0; it < count; ++it) {
    auto f = random_map(R, F, 2);
    Q n2 = norm2(cm, cm, f);
    for (auto& e : dirs) {
      ++lower.cases;
      auto rep = shift_report(cm, cm, e, f, w1);
      for (auto& row : rep.per_cell)
        for (auto& v : row)
          if (v && *v < 0 && *v * *v > n2 * z2->scale2(e)) lower.fail("shift " + scalar_str(*v) + " at " + e.str());
    }
  }
  out.push_back(lower);

  auto tree = std::make_shared<TreeModel>(Group::baumslag_solitar(2));
  auto FT = standard_resolution(tree->G);
  auto ct = ControlledModel::standard(tree, FT);
  auto tdirs = sample_directions(*tree, 6, seed);
  PropertyReport transl{"gsh_{ge}(gφ) = gsh_e(φ), ‖gφ‖ = ‖φ‖"};
  for (size_t it = 0; it < count; ++it) {
    auto f = random_map(R, FT, 1);
    Elem g = gen::elem(R, *tree->G, 3);
    const Dir& e = tdirs[it % tdirs.size()];
    ++transl.cases;
    auto a = shift_report(ct, ct, e, f, w1);
    auto gf = translate_map(g, f);
    auto b = shift_report(ct, ct, tree->act_dir(g, e), gf, Window{1, g});
    if (a.gsh != b.gsh) transl.fail("translate by " + tree->G->format(g) + " toward " + e.str());
    if (norm2(ct, ct, gf) != norm2(ct, ct, f)) transl.fail("norm changes under " + tree->G->format(g));
  }
  out.push_back(transl);

  PropertyReport super{"gsh(ψφ) ≥ gsh(ψ) + gsh(φ), gsh(φᵏ) ≥ k gsh(φ)"};
  for (size_t it = 0; it < count; ++it) {
    auto f = random_map(R, F, 2), g = random_map(R, F, 2);
    const Dir& e = dirs[it % dirs.size()];
    ++super.cases;
    auto a = shift_report(cm, cm, e, f, w1), b = shift_report(cm, cm, e, g, w1);
    auto c = shift_report(cm, cm, e, compose(f, g), w1);
    if (!c.exact) super.fail("composite report is not exact");
    if (a.gsh && b.gsh && val_less(c.gsh, Val(*a.gsh + *b.gsh))) super.fail("superadditivity toward " + e.str());
    int k = static_cast<int>(R.range(2, 3));
    auto ck = shift_report(cm, cm, e, iterate(f, k), w1);
    if (a.gsh && val_less(ck.gsh, Val(*a.gsh * k))) super.fail("gsh(φ^" + std::to_string(k) + ") toward " + e.str());
  }
  out.push_back(super);

  // toward points on the tree: distances are integers, so the window inequalities are exact
  PropertyReport pt{"toward points: sh_b ≥ -‖φ‖, superadditivity on windows"};
  auto verts = window_elems(*tree->G, Window{2, {}});
  for (size_t it = 0; it < count; ++it) {
    auto f = random_map(R, FT, 1), g = random_map(R, FT, 1);
    Point b = tree->act(verts[R.range(0, static_cast<int64_t>(verts.size()) - 1)], ct.base);
    ++pt.cases;
    Q nf2 = norm2(ct, ct, f);
    auto cells = window_cells(*FT, w1, 0, 1);
    std::optional<Q> gf, gg, gc;
    std::vector<std::pair<int, Cell>> images;
    for (auto& [k, y] : cells) {
      Chain cy = FT->basis(k, y.x, y.g);
      Q A = ct.dist2_to(b, cy), B = ct.dist2_to(b, f.apply_cell(k, y));
      if (!sqrt_le_sum(B, A, nf2)) pt.fail("D_b(φy) > D_b(y) + ‖φ‖ at " + FT->format(cy));
      Q s = exact_root(A) - exact_root(B);
      if (!gf || s < *gf) gf = s;
      Q C = ct.dist2_to(b, g.apply(f.apply_cell(k, y)));
      Q sc = exact_root(A) - exact_root(C);
      if (!gc || sc < *gc) gc = sc;
      for (auto& [z, a] : f.apply_cell(k, y).t) images.emplace_back(k, z);
    }
    for (auto& [k, z] : images) {
      Q A = ct.dist2_to(b, FT->basis(k, z.x, z.g)), B = ct.dist2_to(b, g.apply_cell(k, z));
      Q s = exact_root(A) - exact_root(B);
      if (!gg || s < *gg) gg = s;
    }
    // a cell whose image is a chain only loses as much as its worst image cell
    if (gf && gg && gc && *gc < *gf + *gg) pt.fail("superadditivity toward " + tree->point_str(b));
  }
  out.push_back(pt);
  return out;
}

std::vector<PropertyReport> comparison_laws(size_t pairs, uint64_t seed) {
  gen::Rng R(seed);
  std::vector<PropertyReport> out;
  for (auto G : {Group::free_abelian(2), Group::free_group(2)}) {
    auto F = standard_resolution(G);
    PropertyReport rep{"homotopies between lifts over " + G->spec()};
    Chooser ch{std::nullopt, nullptr, true};
    for (size_t it = 0; it < pairs; ++it) {
      auto phi = random_lift(R, F), psi = random_lift(R, F);
      ++rep.cases;
      if (!is_chain_map(phi) || !lifts_identity(phi)) {
        rep.fail("generator produced a map that is not a lift of id");
        continue;
      }
      try {
        auto s = homotopy_between(phi, psi, ch, {3, 0, F->top() - 1});
        if (!verify_homotopy(phi, psi, s)) rep.fail("φ - ψ ≠ ∂σ + σ∂ at pair " + std::to_string(it));
      } catch (const Error& e) {
        rep.fail(std::string("no homotopy within radius 3: ") + e.what());
      }
    }
    out.push_back(rep);
  }
  return out;
}

std::vector<PropertyReport> novikov_laws(size_t count, uint64_t seed) {
  gen::Rng rng(seed);
  auto M = euclid(Group::free_group(2), {{1, 0}, {0, 1}});
  PropertyReport coh{"Novikov truncation coherence"}, inv{"Novikov two-sided inverses"};
  for (auto dir : {"2,1", "1,-3"}) {
    NovikovRing R(M->G, Ring::rationals(), *discrete_character(*M, M->parse_dir(dir)));
    GroupRing KG(M->G, Ring::rationals());
    for (size_t it = 0; it < count; ++it) {
      Q T = rng.range(3, 6);
      auto u = R.from(gen::gr(rng, KG, 3, 2)), v = R.from(gen::gr(rng, KG, 3, 2));
      ++coh.cases;
      if (R.truncate(R.add(R.truncate(u, 2 * T), R.truncate(v, 2 * T)), T).t != R.add(R.truncate(u, T), R.truncate(v, T)).t)
        coh.fail("add at T = " + scalar_str(T));
      if (!R.agree_below(R.mul(R.truncate(u, 2 * T), R.truncate(v, 2 * T)), R.mul(R.truncate(u, T), R.truncate(v, T)), T))
        coh.fail("mul at T = " + scalar_str(T));
      if (R.is_unit(u)) {
        ++inv.cases;
        auto a = R.invert_if_unit(u, T), b = R.invert_if_unit(u, 2 * T);
        if (R.truncate(b, T).t != a.t) coh.fail("inverse at T = " + scalar_str(T));
        if (!R.agree_below(R.mul(u, a), R.one(), T) || !R.agree_below(R.mul(a, u), R.one(), T))
          inv.fail(R.format(u) + " at T = " + scalar_str(T));
      }
    }
  }
  return {coh, inv};
}

}  // namespace sgm
