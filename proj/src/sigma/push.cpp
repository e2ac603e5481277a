#include <algorithm>
#include <tuple>

#include "sgm/sigma.hpp"

namespace sgm {

namespace {

// row keys of the joint system: (dim of the equation's source cell, its index, A coordinate or -1, target cell)
using RowKey = std::tuple<int, int, int, Cell>;

struct Unknown {
  int k, x;
  Cell c;
};

std::vector<int> radius_schedule(int cap) {
  std::vector<int> rs;
  for (int r = 1; r < cap; r *= 2) rs.push_back(r);
  if (cap >= 1) rs.push_back(cap);
  return rs;
}

std::optional<FinitaryMap> solve_push_system(const ControlledModel& cm, const Dir& e, int n, const Q& nu, int radius,
                                             std::string& note) {
  const auto& F = *cm.F;
  const Group& G = *F.G;
  auto B = window_elems(G, Window{radius, {}});
  std::vector<Unknown> cols;
  for (int k = 0; k <= n; ++k)
    for (int x = 0; x < F.rank(k); ++x) {
      Q thr = *cm.valuation(e, k, Cell{x, G.id()}) + nu;
      // same symbol first, then the others; group elements in ball order
      for (auto& g : B)
        for (int yy = 0; yy < F.rank(k); ++yy) {
          int y = yy == 0 ? x : (yy <= x ? yy - 1 : yy);
          Cell c{y, g};
          if (*cm.valuation(e, k, c) >= thr) cols.push_back({k, x, c});
        }
    }
  Indexer<RowKey> rows;
  SpanSolver S(F.K);
  // where each basis cell x of X_k occurs in the boundaries of X_{k+1}
  std::vector<std::vector<std::vector<std::tuple<int, Elem, Scalar>>>> uses(n + 1);
  for (int k = 0; k <= n; ++k) {
    uses[k].resize(F.rank(k));
    if (k + 1 > n) continue;
    for (int x2 = 0; x2 < F.rank(k + 1); ++x2)
      for (auto& [cell, a] : F.bd[k + 1][x2].t) uses[k][cell.x].emplace_back(x2, cell.g, a);
  }
  for (auto& u : cols) {
    std::vector<std::pair<int, Scalar>> v;
    if (u.k == 0) {
      auto ev = F.eps[u.c.x];
      for (int a = 0; a < F.rankA; ++a)
        if (ev[a] != 0) v.emplace_back(rows.get({0, u.x, a, Cell{}}), ev[a]);
    } else {
      for (auto& [cell, a] : F.bd[u.k][u.c.x].t) {
        Cell t{cell.x, G.mul(u.c.g, cell.g)};
        v.emplace_back(rows.get({u.k, u.x, -1, t}), a);
      }
    }
    // -φ(∂x2) terms: x2 ∈ X_{k+1} with h·x in ∂x2 sees h·(this column)
    for (auto& [x2, h, a] : uses[u.k][u.x]) {
      Cell t{u.c.x, G.mul(h, u.c.g)};
      v.emplace_back(rows.get({u.k + 1, x2, -1, t}), -a);
    }
    std::sort(v.begin(), v.end(), [](auto& p, auto& q) { return p.first < q.first; });
    SparseVec sv;
    for (auto& [i, a] : v) {
      if (!sv.empty() && sv.back().first == i) {
        sv.back().second += a;
        if (sv.back().second == 0) sv.pop_back();
      } else {
        sv.emplace_back(i, a);
      }
    }
    S.add(sv);
  }
  SparseVec rhs;
  for (int x = 0; x < F.rank(0); ++x)
    for (int a = 0; a < F.rankA; ++a)
      if (F.eps[x][a] != 0) {
        int r = rows.find({0, x, a, Cell{}});
        if (r < 0) {
          note = "no admissible image for " + F.names[0][x] + " on ball(" + std::to_string(radius) + ")";
          return std::nullopt;
        }
        rhs.emplace_back(r, F.eps[x][a]);
      }
  std::sort(rhs.begin(), rhs.end(), [](auto& p, auto& q) { return p.first < q.first; });
  auto sol = S.express(rhs);
  if (!sol) {
    note = "no push on ball(" + std::to_string(radius) + ")";
    return std::nullopt;
  }
  FinitaryMap phi = FinitaryMap::zero(cm.F, cm.F, 0, n);
  for (auto& [j, a] : *sol) {
    Scalar v = F.K.norm(a);
    if (F.K.kind == Ring::Kind::Z && v.get_den() != 1) {
      note = "push on ball(" + std::to_string(radius) + ") needs rational coefficients";
      return std::nullopt;
    }
    auto& u = cols[j];
    F.add_to(phi.table[u.k][u.x], F.basis(u.k, u.c.x, u.c.g), v);
    phi.table[u.k][u.x].dim = u.k;
  }
  return phi;
}

}  // namespace

std::optional<PushCertificate> find_push(const ControlledModel& cm, const Dir& e, int n, const Budgets& b,
                                         std::string* why) {
  if (b.nu <= 0) throw Error("a push needs a strictly positive ν");
  cm.M->check_dir(e);
  if (n < 0) throw Error("find_push needs n >= 0");
  if (n > cm.F->top()) throw Error("the resolution stops below dimension " + std::to_string(n));
  std::string note;
  for (int r : radius_schedule(b.window)) {
    auto phi = solve_push_system(cm, e, n, b.nu, r, note);
    if (!phi) continue;
    Window w{r, {}};
    auto rep = shift_report(cm, cm, e, *phi, w, 0, n);
    if (!rep.gsh || *rep.gsh < b.nu) {
      note = "candidate on ball(" + std::to_string(r) + ") pushes only " + val_str(rep.gsh) + " on the window";
      continue;
    }
    PushCertificate c;
    c.e = e;
    c.n = n;
    c.phi = *phi;
    c.nu = b.nu;
    c.report = rep;
    c.radius = r;
    int hs = std::min(n, cm.F->top() - 1);
    if (hs >= 0) {
      try {
        Chooser ch{e, &cm, true};
        auto s = homotopy_between(*phi, FinitaryMap::identity(cm.F, n), ch, {b.homotopy_radius, 0, hs});
        c.sigma = add_maps(FinitaryMap::zero(cm.F, cm.F, 1, hs), s, -1);
        c.sigma_norm2 = norm2(cm, cm, *c.sigma);
      } catch (const Error&) {
        // certificate stays valid without σ; lag bounds are then unavailable
      }
    }
    return c;
  }
  if (why) *why = note;
  return std::nullopt;
}

bool verify_push(const ControlledModel& cm, const PushCertificate& c, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (c.nu <= 0) return fail("claimed push is not positive");
  if (c.phi.hi() < c.n) return fail("φ is not defined up to dimension n");
  if (!is_chain_map(c.phi)) return fail("∂φ ≠ φ∂");
  if (!lifts_identity(c.phi)) return fail("εφ ≠ ε");
  auto rep = shift_report(cm, cm, c.e, c.phi, Window{c.radius, {}}, 0, c.n);
  if (val_less(rep.gsh, Val(c.nu))) return fail("guaranteed shift " + val_str(rep.gsh) + " is below ν = " + scalar_str(c.nu));
  if (rep.gsh != c.report.gsh || rep.exact != c.report.exact) return fail("recorded shift report does not match");
  if (c.sigma) {
    auto id = FinitaryMap::identity(cm.F, c.n);
    if (!verify_homotopy(id, c.phi, *c.sigma)) return fail("id - φ ≠ ∂σ + σ∂");
    if (norm2(cm, cm, *c.sigma) != c.sigma_norm2) return fail("recorded ‖σ‖ does not match");
  }
  return true;
}

}  // namespace sgm
