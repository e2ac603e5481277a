#include "sgm/finitary.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <mutex>
#include <set>

namespace sgm {

// ---- windows ----

namespace {

std::mutex ball_mu;

const std::vector<Elem>& cached_ball(const Group& G, int R) {
  static std::map<std::pair<std::string, int>, std::vector<Elem>> cache;
  std::lock_guard<std::mutex> lk(ball_mu);
  auto key = std::make_pair(G.spec(), R);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, G.ball(R)).first;
  return it->second;
}

SparseVec to_vec(Indexer<Cell>& rows, const Chain& c) {
  SparseVec v;
  for (auto& [cell, a] : c.t) v.emplace_back(rows.get(cell), a);
  std::sort(v.begin(), v.end(), [](auto& x, auto& y) { return x.first < y.first; });
  return v;
}

SparseVec to_vec_existing(const Indexer<Cell>& rows, const Chain& c, bool& ok) {
  SparseVec v;
  ok = true;
  for (auto& [cell, a] : c.t) {
    int i = rows.find(cell);
    if (i < 0) {
      ok = false;
      return {};
    }
    v.emplace_back(i, a);
  }
  std::sort(v.begin(), v.end(), [](auto& x, auto& y) { return x.first < y.first; });
  return v;
}

Chain zero_chain(int dim) {
  Chain c;
  c.dim = dim;
  return c;
}

}  // namespace

std::string Window::str(const Group& G) const {
  return "ball(" + std::to_string(R) + ")" + (center.empty() || G.is_id(center) ? "" : " at " + G.format(center));
}

std::vector<Elem> window_elems(const Group& G, const Window& w) {
  const auto& B = cached_ball(G, w.R);
  if (w.center.empty() || G.is_id(w.center)) return B;
  std::vector<Elem> out;
  out.reserve(B.size());
  for (auto& h : B) out.push_back(G.mul(w.center, h));
  return out;
}

std::vector<std::pair<int, Cell>> window_cells(const ChainComplex& F, const Window& w, int lo, int hi) {
  std::vector<std::pair<int, Cell>> out;
  auto els = window_elems(*F.G, w);
  for (int k = std::max(lo, 0); k <= std::min(hi, F.top()); ++k)
    for (auto& g : els)
      for (int i = 0; i < F.rank(k); ++i) out.push_back({k, Cell{i, g}});
  return out;
}

// ---- volleys ----

std::vector<Chain> Volley::apply(const Chain& c, size_t cap) const {
  std::vector<Chain> acc{zero_chain(c.dim + degree)};
  for (auto& [cell, a] : c.t) {
    const auto& opts = table.at(c.dim).at(cell.x);
    std::vector<Chain> next;
    for (auto& base : acc)
      for (auto& s : opts) {
        Chain n = base;
        dst->add_to(n, dst->translate(cell.g, s), a);
        n.dim = c.dim + degree;
        if (std::find(next.begin(), next.end(), n) == next.end()) next.push_back(n);
        if (next.size() >= cap) break;
      }
    acc.swap(next);
  }
  return acc;
}

Volley Volley::identity(ComplexPtr F, int hi) {
  Volley V;
  V.src = V.dst = F;
  for (int k = 0; k <= std::min(hi, F->top()); ++k) {
    V.table.emplace_back();
    for (int i = 0; i < F->rank(k); ++i) V.table[k].push_back({F->basis(k, i)});
  }
  return V;
}

Volley Volley::singleton(const FinitaryMap& f) {
  if (!f.equivariant()) throw Error("only equivariant maps induce canonical singleton volleys");
  Volley V;
  V.src = f.src;
  V.dst = f.dst;
  V.degree = f.degree;
  for (auto& row : f.table) {
    V.table.emplace_back();
    for (auto& c : row) V.table.back().push_back({c});
  }
  return V;
}

Volley compose_volleys(const Volley& Psi, const Volley& Phi) {
  if (Phi.dst.get() != Psi.src.get() && complex_to_json(*Phi.dst) != complex_to_json(*Psi.src))
    throw Error("compose_volleys: target of Φ is not the source of Ψ");
  Volley V;
  V.src = Phi.src;
  V.dst = Psi.dst;
  V.degree = Phi.degree + Psi.degree;
  for (int k = 0; k <= Phi.hi(); ++k) {
    if (k + Phi.degree > Psi.hi() || k + Phi.degree < 0) break;
    V.table.emplace_back();
    for (auto& vals : Phi.table[k]) {
      std::vector<Chain> out;
      for (auto& t : vals)
        for (auto& s : Psi.apply(t))
          if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
      V.table.back().push_back(out);
    }
  }
  return V;
}

// ---- finitary maps ----

Chain FinitaryMap::apply_cell(int k, const Cell& y) const {
  auto it = overrides.find({k, y});
  if (it != overrides.end()) return it->second;
  if (k < 0 || k > hi()) throw Error("finitary map undefined in dimension " + std::to_string(k));
  Chain c = dst->translate(y.g, table[k].at(y.x));
  c.dim = k + degree;
  return c;
}

Chain FinitaryMap::apply(const Chain& c) const {
  Chain r = zero_chain(c.dim + degree);
  for (auto& [cell, a] : c.t) dst->add_to(r, apply_cell(c.dim, cell), a);
  r.dim = c.dim + degree;
  return r;
}

FinitaryMap FinitaryMap::identity(ComplexPtr F, int hi) { return right_mult(F, F->G->id(), hi); }

FinitaryMap FinitaryMap::right_mult(ComplexPtr F, const Elem& g, int hi) {
  FinitaryMap f;
  f.src = f.dst = F;
  for (int k = 0; k <= std::min(hi, F->top()); ++k) {
    f.table.emplace_back();
    for (int i = 0; i < F->rank(k); ++i) f.table[k].push_back(F->basis(k, i, g));
  }
  return f;
}

FinitaryMap FinitaryMap::zero(ComplexPtr src, ComplexPtr dst, int degree, int hi) {
  FinitaryMap f;
  f.src = std::move(src);
  f.dst = std::move(dst);
  f.degree = degree;
  for (int k = 0; k <= std::min(hi, f.src->top()); ++k) f.table.emplace_back(f.src->rank(k), zero_chain(k + degree));
  return f;
}

json FinitaryMap::to_json() const {
  json t = json::array();
  for (auto& row : table) {
    json r = json::array();
    for (auto& c : row) r.push_back(chain_to_json(*dst, c));
    t.push_back(r);
  }
  json ov = json::array();
  for (auto& [key, c] : overrides)
    ov.push_back({key.first, src->names[key.first][key.second.x], src->G->format(key.second.g), chain_to_json(*dst, c)});
  json j = {{"degree", degree}, {"table", t}, {"overrides", ov}};
  if (valid_on) j["valid_on"] = {{"R", valid_on->R}, {"center", src->G->format(valid_on->center.empty() ? src->G->id() : valid_on->center)}};
  return j;
}

FinitaryMap FinitaryMap::from_json(ComplexPtr src, ComplexPtr dst, const json& j) {
  FinitaryMap f;
  f.src = std::move(src);
  f.dst = std::move(dst);
  f.degree = j.at("degree");
  for (auto& r : j.at("table")) {
    f.table.emplace_back();
    for (auto& c : r) {
      Chain ch = chain_from_json(*f.dst, c);
      f.table.back().push_back(ch);
    }
  }
  for (int k = 0; k <= f.hi(); ++k) {
    if (static_cast<int>(f.table[k].size()) != f.src->rank(k)) throw Error("map table does not match the source complex");
    for (auto& c : f.table[k]) c.dim = k + f.degree;
  }
  for (auto& o : j.value("overrides", json::array())) {
    int k = o.at(0);
    int x = f.src->index_of(k, o.at(1).get<std::string>());
    if (x < 0) throw Error("override refers to an unknown cell");
    Chain c = chain_from_json(*f.dst, o.at(3));
    c.dim = k + f.degree;
    f.overrides[{k, Cell{x, f.src->G->parse(o.at(2).get<std::string>())}}] = c;
  }
  if (j.contains("valid_on")) f.valid_on = Window{j["valid_on"].at("R"), f.src->G->parse(j["valid_on"].at("center"))};
  return f;
}

FinitaryMap compose(const FinitaryMap& psi, const FinitaryMap& phi, std::optional<Window> w) {
  FinitaryMap f;
  f.src = phi.src;
  f.dst = psi.dst;
  f.degree = phi.degree + psi.degree;
  for (int k = 0; k <= phi.hi(); ++k) {
    int kk = k + phi.degree;
    if (kk < 0 || kk > psi.hi()) break;
    f.table.emplace_back();
    for (auto& c : phi.table[k]) {
      Chain v = zero_chain(kk + psi.degree);
      // the equivariant part of ψ only
      for (auto& [cell, a] : c.t) f.dst->add_to(v, f.dst->translate(cell.g, psi.table[kk].at(cell.x)), a);
      v.dim = kk + psi.degree;
      f.table.back().push_back(v);
    }
  }
  if (phi.equivariant() && psi.equivariant()) return f;
  if (!w) w = phi.valid_on ? phi.valid_on : psi.valid_on;
  if (!w) throw Error("composing non-equivariant maps needs a window");
  for (auto& [k, y] : window_cells(*phi.src, *w, 0, f.hi())) {
    Chain v = psi.apply(phi.apply_cell(k, y));
    Chain d = f.dst->translate(y.g, f.table[k][y.x]);
    d.dim = v.dim;
    if (!(v.t == d.t)) f.overrides[{k, y}] = v;
  }
  f.valid_on = w;
  return f;
}

FinitaryMap iterate(const FinitaryMap& phi, int k, std::optional<Window> w) {
  if (k < 0) throw Error("iterate: k must be >= 0");
  if (phi.degree != 0) throw Error("iterate needs an endomorphism of degree 0");
  FinitaryMap r = FinitaryMap::identity(phi.src, phi.hi());
  for (int i = 0; i < k; ++i) r = compose(phi, r, w);
  return r;
}

FinitaryMap add_maps(const FinitaryMap& a, const FinitaryMap& b, const Scalar& s) {
  if (a.degree != b.degree) throw Error("add_maps: degree mismatch");
  FinitaryMap f = a;
  int hi = std::min(a.hi(), b.hi());
  f.table.resize(hi + 1);
  for (int k = 0; k <= hi; ++k)
    for (size_t i = 0; i < f.table[k].size(); ++i) {
      f.dst->add_to(f.table[k][i], b.table[k][i], s);
      f.table[k][i].dim = k + f.degree;
    }
  if (!a.equivariant() || !b.equivariant()) {
    std::set<std::pair<int, Cell>> keys;
    for (auto& kv : a.overrides) keys.insert(kv.first);
    for (auto& kv : b.overrides) keys.insert(kv.first);
    f.overrides.clear();
    for (auto& key : keys) {
      if (key.first > hi) continue;
      Chain v = a.apply_cell(key.first, key.second);
      f.dst->add_to(v, b.apply_cell(key.first, key.second), s);
      v.dim = key.first + f.degree;
      f.overrides[key] = v;
    }
    if (!f.valid_on) f.valid_on = b.valid_on;
  }
  return f;
}

FinitaryMap translate_map(const Elem& g, const FinitaryMap& phi) {
  FinitaryMap f = phi;
  f.overrides.clear();
  for (auto& [key, c] : phi.overrides) {
    Chain v = f.dst->translate(g, c);
    v.dim = c.dim;
    f.overrides[{key.first, Cell{key.second.x, f.src->G->mul(g, key.second.g)}}] = v;
  }
  if (phi.valid_on) {
    Window w = *phi.valid_on;
    w.center = f.src->G->mul(g, w.center.empty() ? f.src->G->id() : w.center);
    f.valid_on = w;
  }
  return f;
}

// ---- norms and shifts ----

namespace {

Q displacement2(const ControlledModel& cm, const ControlledModel& cmp, int k, const Cell& y, const Chain& img) {
  auto src = cm.points(k, y);
  Q worst = 0;
  for (auto& p : cmp.points(img)) {
    std::optional<Q> best;
    for (auto& q : src) {
      Q d = cm.M->dist2(p, q);
      if (!best || d < *best) best = d;
    }
    if (*best > worst) worst = *best;
  }
  return worst;
}

}  // namespace

Q norm2(const ControlledModel& cm, const ControlledModel& cmp, const FinitaryMap& f, std::optional<Window> w, int lo,
        int hi) {
  if (hi < 0) hi = f.hi();
  Q worst = 0;
  auto take = [&](int k, const Cell& y) {
    Q d = displacement2(cm, cmp, k, y, f.apply_cell(k, y));
    if (d > worst) worst = d;
  };
  for (int k = lo; k <= std::min(hi, f.hi()); ++k)
    for (int i = 0; i < f.src->rank(k); ++i) take(k, Cell{i, f.src->G->id()});
  for (auto& [key, c] : f.overrides)
    if (key.first >= lo && key.first <= hi) take(key.first, key.second);
  if (w)
    for (auto& [k, y] : window_cells(*f.src, *w, lo, std::min(hi, f.hi()))) take(k, y);
  return worst;
}

Q norm2(const ControlledModel& cm, const ControlledModel& cmp, const Volley& V, int lo, int hi) {
  if (hi < 0) hi = V.hi();
  Q worst = 0;
  for (int k = lo; k <= std::min(hi, V.hi()); ++k)
    for (int i = 0; i < V.src->rank(k); ++i)
      for (auto& s : V.table[k][i]) {
        Q d = displacement2(cm, cmp, k, Cell{i, V.src->G->id()}, s);
        if (d > worst) worst = d;
      }
  return worst;
}

bool orbit_constant(const Model& M, const Dir& e) {
  for (int i = 0; i < M.G->ngens(); ++i)
    if (!M.character(e, M.G->gen(i))) return false;
  return true;
}

json ShiftReport::to_json() const {
  json pc = json::array();
  for (auto& row : per_cell) {
    json r = json::array();
    for (auto& v : row) r.push_back(val_str(v));
    pc.push_back(r);
  }
  json j = {{"per_cell", pc}, {"gsh", val_str(gsh)}, {"exact", exact}};
  if (!exact) j["window"] = window;
  if (event_radius2) j["event_radius2"] = scalar_str(*event_radius2);
  return j;
}

ShiftReport shift_report(const ControlledModel& cm, const ControlledModel& cmp, const Dir& e, const FinitaryMap& f,
                         const Window& w, int lo, int hi) {
  if (f.degree != 0) throw Error("shift_report needs a degree-0 map");
  if (hi < 0) hi = f.hi();
  hi = std::min(hi, f.hi());
  ShiftReport r;
  auto sh = [&](int k, const Cell& y) -> Val {
    Val a = cmp.valuation(e, f.apply_cell(k, y));
    if (!a) return std::nullopt;
    return *a - *cm.valuation(e, k, y);
  };
  auto take = [&](const Val& v) {
    if (val_less(v, r.gsh)) r.gsh = v;
  };
  for (int k = 0; k <= hi; ++k) {
    r.per_cell.emplace_back();
    for (int i = 0; i < f.src->rank(k); ++i) {
      Val v = sh(k, Cell{i, f.src->G->id()});
      r.per_cell.back().push_back(v);
      if (k >= lo) take(v);
    }
  }
  r.exact = f.equivariant() && orbit_constant(*cm.M, e);
  if (!r.exact) {
    r.window = "windowed: " + w.str(*f.src->G);
    for (auto& [k, y] : window_cells(*f.src, w, lo, hi)) take(sh(k, y));
    for (auto& [key, c] : f.overrides)
      if (key.first >= lo && key.first <= hi) take(sh(key.first, key.second));
  }
  return r;
}

std::optional<Q> exact_sqrt(const Q& A) {
  if (A < 0) return std::nullopt;
  if (!mpz_perfect_square_p(A.get_num_mpz_t()) || !mpz_perfect_square_p(A.get_den_mpz_t())) return std::nullopt;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), A.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), A.get_den_mpz_t());
  return Q(n, d);
}

Q sqrt_upper(const Q& A) {
  if (auto s = exact_sqrt(A)) return *s;
  mpz_class scale = mpz_class(1) << 32;
  Q y = A * scale * scale;
  mpz_class x, r;
  mpz_fdiv_q(x.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
  return Q(r + 1, scale);
}

Q sqrt_diff(const Q& A, const Q& B) {
  auto a = exact_sqrt(A), b = exact_sqrt(B);
  if (a && b) return *a - *b;
  mpf_class fa(A, 1024), fb(B, 1024);
  mpf_class ra(0, 1024), rb(0, 1024);
  mpf_sqrt(ra.get_mpf_t(), fa.get_mpf_t());
  mpf_sqrt(rb.get_mpf_t(), fb.get_mpf_t());
  mpf_class d(ra - rb, 1024);
  return Q(d);
}

ShiftReport gsh_point(const ControlledModel& cm, const ControlledModel& cmp, const Point& b, const FinitaryMap& f,
                      const Window& w, int lo, int hi) {
  if (f.degree != 0) throw Error("gsh_point needs a degree-0 map");
  if (hi < 0) hi = f.hi();
  hi = std::min(hi, f.hi());
  std::vector<std::pair<Q, Q>> pts;  // (D_b(y)^2, sh_b(y))
  auto cells = window_cells(*f.src, w, lo, hi);
  for (auto& [key, c] : f.overrides)
    if (key.first >= lo && key.first <= hi) cells.push_back(key);
  for (auto& [k, y] : cells) {
    Chain cy = f.src->basis(k, y.x, y.g);
    Q A = cm.dist2_to(b, cy), B = cmp.dist2_to(b, f.apply_cell(k, y));
    pts.emplace_back(A, sqrt_diff(A, B));
  }
  ShiftReport r;
  r.exact = false;
  r.window = "windowed: " + w.str(*f.src->G);
  std::set<Q> radii{Q(0)};
  for (auto& p : pts) radii.insert(p.first);
  // keep R in the inner part of the window so that some cells lie beyond it
  std::vector<Q> rs(radii.begin(), radii.end());
  size_t keep = std::max<size_t>(1, (rs.size() + 1) / 2);
  rs.resize(std::min(rs.size(), keep));
  for (auto& R2 : rs) {
    Val a;
    for (auto& [D2, s] : pts)
      if (D2 > R2 && val_less(Val(s), a)) a = s;
    if (!a) continue;
    if (!r.gsh || *a > *r.gsh) {
      r.gsh = a;
      r.event_radius2 = R2;
    }
  }
  if (!r.gsh) {
    r.gsh = Q(0);
    r.event_radius2 = Q(0);
  }
  return r;
}

// ---- lifts and homotopies ----

std::optional<Chain> solve_boundary(const ChainComplex& Fp, const Chain& rhs, const Chooser& ch, int max_radius,
                                    std::vector<Elem> centers) {
  int k = rhs.dim;
  if (rhs.zero()) return zero_chain(k + 1);
  if (k + 1 > Fp.top()) return std::nullopt;
  const Group& G = *Fp.G;
  for (auto& g : chain_support_elems(rhs)) centers.push_back(g);
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  Indexer<Cell> rows;
  bool ok;
  SpanSolver S(Fp.K);
  std::vector<Cell> cols;
  std::set<Cell> seen;
  SparseVec b;
  size_t prev = 0;
  for (int r = 0; r <= max_radius; ++r) {
    const auto& B = cached_ball(G, r);
    std::vector<Cell> layer;
    for (auto& s : centers)
      for (size_t j = prev; j < B.size(); ++j)
        for (int i = 0; i < Fp.rank(k + 1); ++i) {
          Cell c{i, G.mul(s, B[j])};
          if (seen.insert(c).second) layer.push_back(c);
        }
    prev = B.size();
    if (ch.e && ch.cm) {
      std::vector<std::pair<Q, size_t>> key;
      for (size_t j = 0; j < layer.size(); ++j) key.emplace_back(-*ch.cm->valuation(*ch.e, k + 1, layer[j]), j);
      std::stable_sort(key.begin(), key.end(), [](auto& x, auto& y) { return x.first < y.first; });
      std::vector<Cell> sorted;
      for (auto& [q, j] : key) sorted.push_back(layer[j]);
      layer.swap(sorted);
    }
    for (auto& c : layer) {
      cols.push_back(c);
      Chain bc = Fp.boundary(Fp.basis(k + 1, c.x, c.g));
      S.add(to_vec(rows, bc));
    }
    SparseVec bv = to_vec_existing(rows, rhs, ok);
    if (!ok) continue;
    auto sol = S.express(bv);
    if (!sol) continue;
    Chain out = zero_chain(k + 1);
    for (auto& [j, a] : *sol) {
      Scalar v = Fp.K.norm(a);
      if (Fp.K.kind == Ring::Kind::Z && v.get_den() != 1)
        throw Error("solution requires rational coefficients; use the rationals as ground ring");
      Chain one = Fp.basis(k + 1, cols[j].x, cols[j].g);
      Fp.add_to(out, one, v);
    }
    out.dim = k + 1;
    return out;
  }
  return std::nullopt;
}

FinitaryMap lift_finitary(ComplexPtr F, ComplexPtr Fp, const Chooser& ch, const LiftOptions& opt) {
  if (!F->G->same_as(*Fp->G)) throw Error("lift_finitary: complexes over different groups");
  if (F->rankA != Fp->rankA) throw Error("lift_finitary: augmentation modules differ");
  for (auto* X : {F.get(), Fp.get()}) {
    auto a = is_admissible(*X);
    if (!a.ok)
      throw Error("lift_finitary: complex is not admissible (cell " + X->names[a.offending[0].first][a.offending[0].second] + ")");
  }
  int hi = opt.hi < 0 ? std::min(F->top(), Fp->top()) : std::min({opt.hi, F->top(), Fp->top()});
  FinitaryMap f;
  f.src = F;
  f.dst = Fp;
  f.table.resize(hi + 1);
  // dim 0: ε' φ(x) = ε(x); the action on A is trivial so only coefficients matter
  {
    Indexer<int> rows;
    for (int j = 0; j < F->rankA; ++j) rows.get(j);
    std::vector<int> order;
    for (int i = 0; i < F->rank(0); ++i) {
      order.clear();
      if (ch.prefer_identity) {
        int same = Fp->index_of(0, F->names[0][i]);
        if (same >= 0) order.push_back(same);
      }
      for (int j = 0; j < Fp->rank(0); ++j)
        if (std::find(order.begin(), order.end(), j) == order.end()) order.push_back(j);
      SpanSolver S(Fp->K);
      for (int j : order) {
        SparseVec v;
        for (int a = 0; a < Fp->rankA; ++a)
          if (Fp->eps[j][a] != 0) v.emplace_back(a, Fp->eps[j][a]);
        S.add(v);
      }
      SparseVec b;
      for (int a = 0; a < F->rankA; ++a)
        if (F->eps[i][a] != 0) b.emplace_back(a, F->eps[i][a]);
      auto sol = S.express(b);
      if (!sol) throw Error("lift_finitary: cannot lift ε at " + F->names[0][i]);
      Chain c = zero_chain(0);
      for (auto& [j, a] : *sol) Fp->add_to(c, Fp->basis(0, order[j]), a);
      c.dim = 0;
      f.table[0].push_back(c);
    }
  }
  for (int k = 1; k <= hi; ++k)
    for (int i = 0; i < F->rank(k); ++i) {
      Chain rhs = f.apply(F->bd[k][i]);
      rhs.dim = k - 1;
      std::optional<Chain> sol;
      if (ch.prefer_identity) {
        int same = Fp->index_of(k, F->names[k][i]);
        if (same >= 0 && Fp->bd[k][same].t == rhs.t) sol = Fp->basis(k, same);
      }
      if (!sol) sol = solve_boundary(*Fp, rhs, ch, opt.max_radius);
      if (!sol) throw Error("lift_finitary: window exhausted at " + F->names[k][i]);
      sol->dim = k;
      f.table[k].push_back(*sol);
    }
  if (!is_chain_map(f) || !lifts_identity(f)) throw Error("lift_finitary: internal verification failed");
  return f;
}

FinitaryMap homotopy_between(const FinitaryMap& phi, const FinitaryMap& psi, const Chooser& ch, const LiftOptions& opt) {
  if (!phi.equivariant() || !psi.equivariant()) throw Error("homotopy_between needs equivariant maps");
  if (phi.degree != 0 || psi.degree != 0) throw Error("homotopy_between needs chain maps of degree 0");
  const auto& Fp = *phi.dst;
  int hi = std::min(phi.hi(), psi.hi());
  if (opt.hi >= 0) hi = std::min(hi, opt.hi);
  FinitaryMap s = FinitaryMap::zero(phi.src, phi.dst, 1, hi);
  for (int k = 0; k <= hi; ++k)
    for (int i = 0; i < phi.src->rank(k); ++i) {
      Chain rhs = phi.table[k][i];
      Fp.add_to(rhs, psi.table[k][i], -1);
      if (k > 0) Fp.add_to(rhs, s.apply(phi.src->bd[k][i]), -1);
      rhs.dim = k;
      if (k == 0)
        for (auto& a : Fp.augment(rhs))
          if (a != 0) throw Error("homotopy_between: ε'(φ - ψ) != 0");
      auto sol = solve_boundary(Fp, rhs, ch, opt.max_radius);
      if (!sol) throw Error("homotopy_between: window exhausted at " + phi.src->names[k][i]);
      sol->dim = k + 1;
      s.table[k][i] = *sol;
    }
  if (!verify_homotopy(phi, psi, s)) throw Error("homotopy_between: verification failed");
  return s;
}

namespace {

std::vector<std::pair<int, Cell>> check_cells(const FinitaryMap& f, std::optional<Window> w, int lo, int hi) {
  std::vector<std::pair<int, Cell>> cells;
  if (!w) w = f.valid_on;
  if (w && !f.equivariant()) return window_cells(*f.src, *w, lo, hi);
  for (int k = lo; k <= hi; ++k)
    for (int i = 0; i < f.src->rank(k); ++i) cells.push_back({k, Cell{i, f.src->G->id()}});
  return cells;
}

}  // namespace

bool verify_homotopy(const FinitaryMap& phi, const FinitaryMap& psi, const FinitaryMap& sigma, std::optional<Window> w) {
  const auto& Fp = *phi.dst;
  int hi = std::min({phi.hi(), psi.hi(), sigma.hi()});
  std::optional<Window> ww = w ? w : (phi.valid_on ? phi.valid_on : (psi.valid_on ? psi.valid_on : sigma.valid_on));
  bool eq = phi.equivariant() && psi.equivariant() && sigma.equivariant();
  std::vector<std::pair<int, Cell>> cells;
  if (eq || !ww) {
    for (int k = 0; k <= hi; ++k)
      for (int i = 0; i < phi.src->rank(k); ++i) cells.push_back({k, Cell{i, phi.src->G->id()}});
  } else {
    cells = window_cells(*phi.src, *ww, 0, hi);
  }
  for (auto& [k, y] : cells) {
    Chain lhs = phi.apply_cell(k, y);
    Fp.add_to(lhs, psi.apply_cell(k, y), -1);
    Chain rhs = Fp.boundary(sigma.apply_cell(k, y));
    if (k > 0) Fp.add_to(rhs, sigma.apply(phi.src->boundary(phi.src->basis(k, y.x, y.g))), 1);
    if (lhs.t != rhs.t) return false;
  }
  return true;
}

bool is_chain_map(const FinitaryMap& f, std::optional<Window> w) {
  for (auto& [k, y] : check_cells(f, w, 1, f.hi())) {
    Chain a = f.dst->boundary(f.apply_cell(k, y));
    Chain b = f.apply(f.src->boundary(f.src->basis(k, y.x, y.g)));
    if (a.t != b.t) return false;
  }
  return true;
}

bool lifts_identity(const FinitaryMap& f, std::optional<Window> w) {
  if (f.degree != 0 || f.hi() < 0) return false;
  for (auto& [k, y] : check_cells(f, w, 0, 0))
    if (f.dst->augment(f.apply_cell(0, y)) != f.src->augment(f.src->basis(0, y.x, y.g))) return false;
  return true;
}

LimitPush push_at_limit(const ControlledModel& cm, const FinitaryMap& phi, const Dir& e, const Dir& ehat,
                        const Q& delta, const Window& w, int ball_budget) {
  const Model& M = *cm.M;
  Dir eh = M.canonical(ehat);
  if (M.translation_action() || M.canonical(e) == eh) {
    if (!(M.canonical(e) == eh)) throw Error("push_at_limit: Euclidean orbit closures are singletons");
    return {phi, M.G->id(), shift_report(cm, cm, eh, phi, w)};
  }
  const auto& B = cached_ball(*M.G, ball_budget);
  // exact translates first, then any translate that pushes enough on the window
  for (int pass = 0; pass < 2; ++pass)
    for (auto& g : B) {
      if (pass == 0 && !(M.canonical(M.act_dir(g, e)) == eh)) continue;
      FinitaryMap psi = translate_map(g, phi);
      auto rep = shift_report(cm, cm, eh, psi, w);
      if (!rep.gsh || *rep.gsh >= delta / 2) return {psi, g, rep};
    }
  throw Error("push_at_limit: no adequate translate within ball(" + std::to_string(ball_budget) + ")");
}

}  // namespace sgm
