#include <algorithm>
#include <functional>

#include "sgm/sigma.hpp"

namespace sgm {

namespace {

// A coordinates live in rows keyed by Cell{-1-j, {}}
SparseVec image_vec(const ChainComplex& F, const Chain& c, Indexer<Cell>& rows) {
  std::map<int, Scalar> acc;
  if (c.dim == 0) {
    auto a = F.augment(c);
    for (int j = 0; j < F.rankA; ++j)
      if (a[j] != 0) acc[rows.get(Cell{-1 - j, {}})] += a[j];
  } else {
    for (auto& [cell, v] : F.boundary(c).t) acc[rows.get(cell)] += v;
  }
  SparseVec out;
  for (auto& [i, v] : acc)
    if (v != 0) out.emplace_back(i, v);
  return out;
}

SparseVec target_vec(const Chain& z, Indexer<Cell>& rows) {
  std::map<int, Scalar> acc;
  for (auto& [cell, v] : z.t) acc[rows.get(cell)] += v;
  return {acc.begin(), acc.end()};
}

SparseVec avec_target(const AVec& a, Indexer<Cell>& rows) {
  std::map<int, Scalar> acc;
  for (size_t j = 0; j < a.size(); ++j)
    if (a[j] != 0) acc[rows.get(Cell{-1 - static_cast<int>(j), {}})] = a[j];
  return {acc.begin(), acc.end()};
}

Chain combo_chain(const ChainComplex& F, int dim, const std::vector<Cell>& cells, const SparseVec& combo) {
  Chain c;
  c.dim = dim;
  for (auto& [j, a] : combo) F.add_to(c, F.basis(dim, cells[j].x, cells[j].g), a);
  return c;
}

// cycles of the given cells (kernel of ∂, or of ε in dim 0)
std::vector<Chain> cycles_of(const ChainComplex& F, int dim, const std::vector<Cell>& cells) {
  Indexer<Cell> rows;
  SpanSolver S(F.K);
  for (auto& c : cells) S.add(image_vec(F, F.basis(dim, c.x, c.g), rows));
  std::vector<Chain> out;
  for (auto& k : S.kernel()) out.push_back(combo_chain(F, dim, cells, k));
  return out;
}

Elem greedy(const Group& G, const std::function<Q(const Elem&)>& score, const std::function<bool(const Q&)>& done) {
  Elem g = G.id();
  Q cur = score(g);
  for (int step = 0; step < 512 && !done(cur); ++step) {
    std::optional<Elem> best;
    Q bv = cur;
    for (int i = 0; i < G.ngens(); ++i)
      for (int sg : {1, -1}) {
        Elem h = G.mul(g, G.gen(i, sg));
        Q hv = score(h);
        if (hv > bv) {
          bv = hv;
          best = h;
        }
      }
    if (!best) break;
    g = *best;
    cur = bv;
  }
  return g;
}

Elem climb(const ControlledModel& cm, const Dir& e, const Q& s) {
  const Group& G = *cm.F->G;
  auto v = [&](const Elem& g) { return *cm.valuation(e, 0, Cell{0, g}); };
  Elem g = greedy(G, v, [&](const Q& x) { return x >= s; });
  if (v(g) < s) throw Error("no orbit point reaches level " + scalar_str(s));
  return g;
}

Elem nearest(const ControlledModel& cm, const Point& b) {
  const Group& G = *cm.F->G;
  auto d = [&](const Elem& g) { return -cm.dist2_to(b, cm.F->basis(0, 0, g)); };
  return greedy(G, d, [](const Q& x) { return x == 0; });
}

std::vector<Cell> cells_of(const ChainComplex& F, const Window& w, int dim) {
  std::vector<Cell> out;
  for (auto& [k, c] : window_cells(F, w, dim, dim)) out.push_back(c);
  return out;
}

// columns grouped by a key, best group first
template <class Key, class Better>
std::vector<std::vector<Cell>> group_by(std::vector<Cell> cells, Key key, Better better) {
  std::vector<std::pair<Q, Cell>> kc;
  for (auto& c : cells) kc.emplace_back(key(c), c);
  std::stable_sort(kc.begin(), kc.end(), [&](auto& p, auto& q) { return better(p.first, q.first); });
  std::vector<std::vector<Cell>> out;
  for (size_t i = 0; i < kc.size(); ++i) {
    if (i == 0 || kc[i].first != kc[i - 1].first) out.emplace_back();
    out.back().push_back(kc[i].second);
  }
  return out;
}

// Solves ∂c = target (or ε c = a) with the earliest possible column group.
// Returns, per target, the chain found (nullopt if the window is exhausted).
std::vector<std::optional<Chain>> bound_incrementally(const ChainComplex& F, int dim,
                                                      const std::vector<std::vector<Cell>>& groups,
                                                      const std::vector<SparseVec>& targets, Indexer<Cell>& rows) {
  std::vector<std::optional<Chain>> found(targets.size());
  SpanSolver S(F.K);
  std::vector<Cell> cols;
  size_t open = targets.size();
  for (auto& grp : groups) {
    if (open == 0) break;
    for (auto& c : grp) {
      S.add(image_vec(F, F.basis(dim, c.x, c.g), rows));
      cols.push_back(c);
    }
    for (size_t t = 0; t < targets.size(); ++t) {
      if (found[t]) continue;
      auto sol = S.express(targets[t]);
      if (!sol) continue;
      found[t] = combo_chain(F, dim, cols, *sol);
      --open;
    }
  }
  return found;
}

Q ceil_div(const Q& a, const Q& b) {
  Q r = a / b;
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return Q(q);
}

}  // namespace

Q LagEstimate::max_lag() const {
  Q m = 0;
  for (auto& l : levels) m = std::max(m, l.lag);
  return m;
}

bool LagEstimate::all_bounded() const {
  return std::all_of(levels.begin(), levels.end(), [](auto& l) { return l.bounded; });
}

LagEstimate ca_check(const ControlledModel& cm, const Dir& e, int n, const std::vector<Q>& levels, const Window& w,
                     int margin, const PushCertificate* cert) {
  const auto& F = *cm.F;
  cm.M->check_dir(e);
  LagEstimate est;
  for (int i = -1; i <= n - 1 && i + 1 <= F.top(); ++i) {
    for (auto& s : levels) {
      Elem center = climb(cm, e, s);
      Window wc{w.R, center}, wp{w.R + margin, center};
      Indexer<Cell> rows;
      std::vector<BoundingCertificate> tg;
      std::vector<SparseVec> tv;
      if (i < 0) {
        for (int j = 0; j < F.rankA; ++j) {
          BoundingCertificate bc;
          bc.i = -1;
          bc.level = s;
          bc.a.assign(F.rankA, Scalar(0));
          bc.a[j] = 1;
          bc.vz = s;
          tv.push_back(avec_target(bc.a, rows));
          tg.push_back(std::move(bc));
        }
      } else {
        std::vector<Cell> hi;
        for (auto& c : cells_of(F, wc, i))
          if (*cm.valuation(e, i, c) >= s) hi.push_back(c);
        for (auto& z : cycles_of(F, i, hi)) {
          BoundingCertificate bc;
          bc.i = i;
          bc.level = s;
          bc.vz = cm.valuation(e, z);
          tv.push_back(target_vec(z, rows));
          bc.z = std::move(z);
          tg.push_back(std::move(bc));
        }
      }
      auto groups = group_by(
          cells_of(F, wp, i + 1), [&](const Cell& c) { return *cm.valuation(e, i + 1, c); },
          [](const Q& a, const Q& b) { return a > b; });
      auto found = bound_incrementally(F, i + 1, groups, tv, rows);
      LevelLag ll;
      ll.i = i;
      ll.s = s;
      ll.cycles = tg.size();
      for (size_t t = 0; t < tg.size(); ++t) {
        auto& bc = tg[t];
        if (!found[t]) {
          ll.bounded = false;
          continue;
        }
        auto lag_of = [&](const Val& vc) {
          if (!vc) return Q(0);
          if (!bc.vz) return Q(0);
          return std::max<Q>(Q(0), *bc.vz - *vc);
        };
        bc.c = *found[t];
        bc.vc = cm.valuation(e, bc.c);
        bc.lag = lag_of(bc.vc);
        bc.source = "window";
        if (cert && cert->sigma && i <= cert->sigma->hi()) {
          // c' = Σ_{j<K} σ φʲ z + φᴷ d, with K large enough that φᴷ d sits above z
          Chain d = bc.c;
          Val vd = bc.vc;
          int K = 0;
          if (vd && bc.vz && *vd < *bc.vz) {
            if (!cert->report.gsh)
              K = 1;
            else
              K = static_cast<int>(ceil_div(*bc.vz - *vd, *cert->report.gsh).get_d());
          }
          K = std::min(K, 64);
          Chain acc;
          acc.dim = i + 1;
          Chain pz = bc.z;
          for (int j = 0; j < K && i >= 0; ++j) {
            F.add_to(acc, cert->sigma->apply(pz));
            pz = cert->phi.apply(pz);
          }
          for (int j = 0; j < K; ++j) d = cert->phi.apply(d);
          F.add_to(acc, d);
          bool ok = i < 0 ? F.augment(acc) == bc.a : F.boundary(acc) == bc.z;
          if (!ok) throw Error("constructed bounding chain does not bound");
          Val vc2 = cm.valuation(e, acc);
          Q lag2 = lag_of(vc2);
          if (lag2 < bc.lag) {
            bc.c = std::move(acc);
            bc.vc = vc2;
            bc.lag = lag2;
            bc.source = "certificate";
          }
        }
        ll.lag = std::max(ll.lag, bc.lag);
        est.certs.push_back(std::move(bc));
      }
      est.levels.push_back(ll);
    }
  }
  return est;
}

LagEstimate lag_from_push(const ControlledModel& cm, const PushCertificate& cert, const Budgets& b) {
  if (!cert.sigma) throw Error("push certificate carries no homotopy; no lag bound");
  auto est = ca_check(cm, cert.e, cert.n, b.levels, Window{b.lag_window, {}}, b.lag_margin, &cert);
  Q l2 = cert.sigma_norm2 * cm.M->scale2(cert.e);
  for (auto& bc : est.certs)
    if (bc.lag > 0 && bc.lag * bc.lag > l2)
      throw Error("observed lag " + scalar_str(bc.lag) + " exceeds the homotopy bound (λ² = " + scalar_str(l2) + ")");
  est.constant = true;
  est.lambda2 = l2;
  return est;
}

std::vector<PointLag> ca_over_point(const ControlledModel& cm, const Point& b, int n, const Window& w, int margin) {
  const auto& F = *cm.F;
  Elem center = nearest(cm, b);
  Window wc{w.R, center}, wp{w.R + margin, center};
  auto d2 = [&](int dim, const Cell& c) { return cm.dist2_to(b, F.basis(dim, c.x, c.g)); };
  std::vector<PointLag> out;
  for (int i = -1; i <= n - 1 && i + 1 <= F.top(); ++i) {
    std::vector<Q> radii{0};
    std::vector<Cell> zc;
    if (i >= 0) {
      zc = cells_of(F, wc, i);
      std::vector<Q> all;
      for (auto& c : zc) all.push_back(d2(i, c));
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      radii.clear();
      if (!all.empty()) {
        // the smallest radius carrying a cycle, a middle one and the whole window
        for (size_t k : {std::min<size_t>(1, all.size() - 1), all.size() / 2, all.size() - 1}) radii.push_back(all[k]);
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
      }
    }
    auto groups = group_by(
        cells_of(F, wp, i + 1), [&](const Cell& c) { return d2(i + 1, c); }, [](const Q& a, const Q& b) { return a < b; });
    for (auto& r2 : radii) {
      PointLag pl;
      pl.i = i;
      pl.radius2 = r2;
      Indexer<Cell> rows;
      std::vector<SparseVec> tv;
      std::vector<Q> dz;
      if (i < 0) {
        for (int j = 0; j < F.rankA; ++j) {
          AVec a(F.rankA, Scalar(0));
          a[j] = 1;
          tv.push_back(avec_target(a, rows));
          dz.push_back(0);
        }
      } else {
        std::vector<Cell> in;
        for (auto& c : zc)
          if (d2(i, c) <= r2) in.push_back(c);
        for (auto& z : cycles_of(F, i, in)) {
          tv.push_back(target_vec(z, rows));
          dz.push_back(cm.dist2_to(b, z));
        }
      }
      pl.cycles = tv.size();
      auto found = bound_incrementally(F, i + 1, groups, tv, rows);
      for (size_t t = 0; t < tv.size(); ++t) {
        if (!found[t]) {
          pl.bounded = false;
          continue;
        }
        Q dc = cm.dist2_to(b, *found[t]);
        if (dc > dz[t]) pl.lag = std::max(pl.lag, sqrt_diff(dc, dz[t]));
      }
      out.push_back(pl);
    }
  }
  return out;
}

std::optional<Q> bounded_support_check(const ControlledModel& cm, const Point& b, const std::vector<AVec>& samples,
                                       int radius_budget) {
  const auto& F = *cm.F;
  Elem center = nearest(cm, b);
  auto groups = group_by(
      cells_of(F, Window{radius_budget, center}, 0), [&](const Cell& c) { return cm.dist2_to(b, F.basis(0, c.x, c.g)); },
      [](const Q& a, const Q& b) { return a < b; });
  Indexer<Cell> rows;
  std::vector<SparseVec> tv;
  for (auto& a : samples) {
    if (static_cast<int>(a.size()) != F.rankA) throw Error("sample has the wrong rank");
    tv.push_back(avec_target(a, rows));
  }
  auto found = bound_incrementally(F, 0, groups, tv, rows);
  Q r2 = 0;
  for (size_t t = 0; t < tv.size(); ++t) {
    if (tv[t].empty()) continue;
    if (!found[t]) return std::nullopt;
    r2 = std::max(r2, cm.dist2_to(b, *found[t]));
  }
  return r2;
}

}  // namespace sgm
