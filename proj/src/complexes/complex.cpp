#include <algorithm>
#include <array>
#include <sstream>

#include "sgm/complexes.hpp"

namespace sgm {

int ChainComplex::index_of(int k, const std::string& name) const {
  if (k < 0 || k > top()) return -1;
  for (int i = 0; i < rank(k); ++i)
    if (names[k][i] == name) return i;
  return -1;
}

Chain ChainComplex::basis(int k, int i, const Elem& g) const {
  if (i < 0 || i >= rank(k)) throw Error("basis index out of range in dimension " + std::to_string(k));
  Chain c;
  c.dim = k;
  c.t.emplace(Cell{i, g}, Scalar(1));
  return c;
}

void ChainComplex::add_to(Chain& c, const Chain& d, const Scalar& a) const {
  if (a == 0) return;
  if (!d.zero() && !c.zero() && c.dim != d.dim) throw Error("adding chains of different dimension");
  if (c.zero()) c.dim = d.dim;
  for (auto& [cell, v] : d.t) {
    auto it = c.t.find(cell);
    if (it == c.t.end()) {
      Scalar w = K.norm(a * v);
      if (w != 0) c.t.emplace(cell, w);
    } else {
      it->second = K.norm(it->second + a * v);
      if (it->second == 0) c.t.erase(it);
    }
  }
}

Chain ChainComplex::add(const Chain& c, const Chain& d) const {
  Chain r = c;
  add_to(r, d, 1);
  if (c.zero()) r.dim = d.dim;
  return r;
}

Chain ChainComplex::sub(const Chain& c, const Chain& d) const {
  Chain r = c;
  add_to(r, d, -1);
  if (c.zero()) r.dim = d.dim;
  return r;
}

Chain ChainComplex::scale(const Chain& c, const Scalar& a) const {
  Chain r;
  r.dim = c.dim;
  add_to(r, c, a);
  r.dim = c.dim;
  return r;
}

Chain ChainComplex::translate(const Elem& g, const Chain& c) const {
  Chain r;
  r.dim = c.dim;
  for (auto& [cell, v] : c.t) r.t.emplace(Cell{cell.x, G->mul(g, cell.g)}, v);
  return r;
}

Chain ChainComplex::lmul(const GRElem& u, const Chain& c) const {
  Chain r;
  r.dim = c.dim;
  for (auto& [g, a] : u.t) add_to(r, translate(g, c), a);
  r.dim = c.dim;
  return r;
}

Chain ChainComplex::boundary(const Chain& c) const {
  Chain r;
  r.dim = c.dim - 1;
  if (c.dim <= 0) return r;
  if (c.dim > top()) throw Error("boundary above the stored skeleton");
  for (auto& [cell, a] : c.t) add_to(r, translate(cell.g, bd[c.dim][cell.x]), a);
  r.dim = c.dim - 1;
  return r;
}

AVec ChainComplex::augment(const Chain& c) const {
  AVec r(rankA, Scalar(0));
  if (c.dim != 0) return r;
  for (auto& [cell, a] : c.t)
    for (int j = 0; j < rankA; ++j) r[j] = K.norm(r[j] + a * eps[cell.x][j]);
  return r;
}

std::string ChainComplex::format(const Chain& c) const {
  if (c.zero()) return "0";
  std::string out;
  for (auto& [cell, v] : c.t) {
    bool neg = v < 0;
    Scalar a = neg ? Scalar(-v) : v;
    out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
    if (a != 1) out += a.get_str() + " ";
    if (!G->is_id(cell.g)) out += G->format(cell.g) + " ";
    out += names[c.dim][cell.x];
  }
  return out;
}

Chain ChainComplex::parse_chain(int dim, const std::string& s) const {
  GroupRing R(G, K);
  Chain out;
  out.dim = dim;
  std::vector<std::pair<int, std::string>> terms;
  int depth = 0, sign = 1;
  std::string cur;
  auto flush = [&] {
    if (cur.find_first_not_of(" \t") != std::string::npos) terms.emplace_back(sign, cur);
    cur.clear();
  };
  for (size_t i = 0; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    bool exp_sign = i > 0 && s[i - 1] == '^';
    if (depth == 0 && (ch == '+' || ch == '-') && !exp_sign) {
      flush();
      sign = ch == '-' ? -1 : 1;
    } else {
      cur += ch;
    }
  }
  flush();
  for (auto& [sg, t] : terms) {
    std::string body = t;
    GRElem coef = R.one();
    auto lp = body.find('(');
    if (lp != std::string::npos) {
      auto rp = body.rfind(')');
      if (rp == std::string::npos) throw Error("unbalanced parentheses in '" + s + "'");
      std::string pre = body.substr(0, lp);
      if (pre.find_first_not_of(" *\t") != std::string::npos) coef = R.parse(pre);
      coef = R.mul(coef, R.parse(body.substr(lp + 1, rp - lp - 1)));
      body = body.substr(rp + 1);
    }
    std::istringstream in(body);
    std::vector<std::string> toks;
    std::string tok;
    while (in >> tok) toks.push_back(tok);
    if (toks.empty()) throw Error("missing basis symbol in '" + t + "'");
    std::string name = toks.back();
    toks.pop_back();
    int idx = index_of(dim, name);
    if (idx < 0) throw Error("unknown basis symbol '" + name + "' in dimension " + std::to_string(dim));
    std::string mono;
    for (auto& x : toks) mono += x + " ";
    if (!mono.empty()) coef = R.mul(coef, R.parse(mono));
    add_to(out, lmul(coef, basis(dim, idx)), sg);
  }
  out.dim = dim;
  return out;
}

void ChainComplex::validate() const {
  if (names.empty() || names[0].empty()) throw Error("complex has no 0-cells");
  if (static_cast<int>(eps.size()) != rank(0)) throw Error("augmentation table size mismatch");
  for (int i = 0; i < rank(0); ++i)
    if (static_cast<int>(eps[i].size()) != rankA)
      throw Error("augmentation of " + names[0][i] + " has wrong rank");
  if (static_cast<int>(bd.size()) != top() + 1) throw Error("boundary table dimension mismatch");
  for (int k = 1; k <= top(); ++k) {
    if (static_cast<int>(bd[k].size()) != rank(k))
      throw Error("boundary table size mismatch in dimension " + std::to_string(k));
    for (int i = 0; i < rank(k); ++i) {
      const Chain& b = bd[k][i];
      if (!b.zero() && b.dim != k - 1)
        throw Error("boundary of " + names[k][i] + " has dimension " + std::to_string(b.dim) +
                    ", expected " + std::to_string(k - 1));
      for (auto& [cell, v] : b.t)
        if (cell.x < 0 || cell.x >= rank(k - 1))
          throw Error("boundary of " + names[k][i] + " refers to a missing cell");
      if (k == 1) {
        for (auto& a : augment(b))
          if (a != 0) throw Error("ε∂ != 0 on " + names[k][i]);
      } else if (!boundary(b).zero()) {
        throw Error("∂∂ != 0 on " + names[k][i]);
      }
    }
  }
}

std::vector<Elem> chain_support_elems(const Chain& c) {
  std::set<Elem> s;
  for (auto& kv : c.t) s.insert(kv.first.g);
  return {s.begin(), s.end()};
}

GRElem fox_derivative(const GroupRing& R, const Word& w, int j) {
  const Group& G = *R.group();
  GRElem out;
  Elem prefix = G.id();
  for (auto& [i, e] : w) {
    if (i == j) {
      Elem g = G.gen(i, 1);
      if (e > 0) {
        Elem p = prefix;
        for (int64_t k = 0; k < e; ++k) {
          add_term(R.ring(), out.t, p, 1);
          p = G.mul(p, g);
        }
      } else {
        Elem gi = G.inv(g), p = prefix;
        for (int64_t k = 0; k < -e; ++k) {
          p = G.mul(p, gi);
          add_term(R.ring(), out.t, p, -1);
        }
      }
    }
    prefix = G.mul(prefix, G.gen(i, e));
  }
  return out;
}

ComplexPtr resolution_from_tables(GroupPtr G, Ring K, std::vector<std::vector<std::string>> names,
                                  std::vector<std::vector<Chain>> bd, std::vector<AVec> eps, int rankA) {
  auto F = std::make_shared<ChainComplex>();
  F->G = std::move(G);
  F->K = K;
  F->rankA = rankA;
  F->names = std::move(names);
  F->bd = std::move(bd);
  F->eps = std::move(eps);
  while (F->bd.size() < F->names.size()) F->bd.emplace_back();
  if (!F->bd.empty()) F->bd[0].clear();
  for (auto& row : F->eps)
    for (auto& a : row) a = K.norm(a);
  F->validate();
  return F;
}

ComplexPtr fox_resolution(const Presentation& p, Ring K, int N) {
  if (p.module != "trivial") throw Error("fox_resolution needs the trivial module; use resolution_from_tables");
  if (N < 1) throw Error("skeleton bound must be >= 1");
  GroupRing R(p.G, K);
  const Group& G = *p.G;
  std::vector<std::vector<std::string>> names(std::min(N, 2) + 1);
  std::vector<std::vector<Chain>> bd(names.size());
  names[0] = {"x0"};
  for (int i = 0; i < G.ngens(); ++i) {
    names[1].push_back("x_" + G.gen_names()[i]);
    Chain c;
    c.dim = 0;
    c.t.emplace(Cell{0, G.gen(i)}, Scalar(1));
    c.t.emplace(Cell{0, G.id()}, Scalar(-1));
    bd[1].push_back(c);
  }
  if (N >= 2) {
    for (size_t r = 0; r < p.relators.size(); ++r) {
      std::string nm = r < p.relator_names.size() ? p.relator_names[r]
                                                  : (p.relators.size() == 1 ? "r" : "r" + std::to_string(r + 1));
      names[2].push_back("x_" + nm);
      Chain c;
      c.dim = 1;
      for (int j = 0; j < G.ngens(); ++j)
        for (auto& [g, a] : fox_derivative(R, p.relators[r], j).t) c.t.emplace(Cell{j, g}, a);
      bd[2].push_back(c);
    }
  }
  auto F = resolution_from_tables(p.G, K, names, bd, {AVec{Scalar(1)}}, 1);
  std::const_pointer_cast<ChainComplex>(F)->origin = "fox";
  return F;
}

Admissibility is_admissible(const ChainComplex& F) {
  Admissibility a;
  for (int i = 0; i < F.rank(0); ++i)
    if (std::all_of(F.eps[i].begin(), F.eps[i].end(), [](auto& v) { return v == 0; })) a.offending.push_back({0, i});
  for (int k = 1; k <= F.top(); ++k)
    for (int i = 0; i < F.rank(k); ++i)
      if (F.bd[k][i].zero()) a.offending.push_back({k, i});
  a.ok = a.offending.empty();
  return a;
}

namespace {

bool used_above(const ChainComplex& F, int k, int i) {
  if (k + 1 > F.top()) return false;
  for (auto& b : F.bd[k + 1])
    for (auto& kv : b.t)
      if (kv.first.x == i) return true;
  return false;
}

// basis change x_i -> y = x_i + x_j in dimension k: boundaries above get λ g x_i -> λ g y - λ g x_j
void substitute(ChainComplex& F, int k, int i, int j) {
  if (k == 0) {
    for (int a = 0; a < F.rankA; ++a) F.eps[i][a] = F.K.norm(F.eps[i][a] + F.eps[j][a]);
  } else {
    F.add_to(F.bd[k][i], F.bd[k][j], 1);
    F.bd[k][i].dim = k - 1;
  }
  F.names[k][i] = F.names[k][i] + "+" + F.names[k][j];
  if (k + 1 > F.top()) return;
  for (auto& b : F.bd[k + 1]) {
    Chain extra;
    extra.dim = k;
    for (auto& [cell, v] : b.t)
      if (cell.x == i) extra.t.emplace(Cell{j, cell.g}, -v);
    F.add_to(b, extra, 1);
    b.dim = k;
  }
}

void erase_cell(ChainComplex& F, int k, int i) {
  F.names[k].erase(F.names[k].begin() + i);
  if (k == 0)
    F.eps.erase(F.eps.begin() + i);
  else
    F.bd[k].erase(F.bd[k].begin() + i);
  if (k + 1 > F.top()) return;
  for (auto& b : F.bd[k + 1]) {
    Chain r;
    r.dim = k;
    for (auto& [cell, v] : b.t) r.t.emplace(Cell{cell.x > i ? cell.x - 1 : cell.x, cell.g}, v);
    b = r;
  }
}

}  // namespace

ComplexPtr make_admissible(const ChainComplex& F0) {
  auto F = std::make_shared<ChainComplex>(F0);
  for (int k = 0; k <= F->top(); ++k) {
    for (int i = 0; i < F->rank(k);) {
      bool dead = k == 0 ? std::all_of(F->eps[i].begin(), F->eps[i].end(), [](auto& v) { return v == 0; })
                         : F->bd[k][i].zero();
      if (!dead) {
        ++i;
        continue;
      }
      int partner = -1;
      for (int j = 0; j < F->rank(k) && partner < 0; ++j) {
        if (j == i) continue;
        bool live = k == 0 ? std::any_of(F->eps[j].begin(), F->eps[j].end(), [](auto& v) { return v != 0; })
                           : !F->bd[k][j].zero();
        if (live) partner = j;
      }
      if (partner >= 0) {
        substitute(*F, k, i, partner);
        ++i;
      } else if (!used_above(*F, k, i)) {
        erase_cell(*F, k, i);
      } else {
        throw Error("make_admissible: every cell of dimension " + std::to_string(k) +
                    " is dead and " + F->names[k][i] + " is used above; deleting would change homology");
      }
    }
  }
  F->validate();
  return F;
}

Expansion elementary_expansion(const ChainComplex& F0, const Chain& x, const Chain& c, const Chain& d) {
  if (x.t.size() != 1 || x.t.begin()->second != 1) throw Error("elementary_expansion: x must be a single cell");
  int k = x.dim;
  if (c.dim != k && !c.zero()) throw Error("elementary_expansion: c has the wrong dimension");
  if (d.dim != k + 1 && !d.zero()) throw Error("elementary_expansion: d has the wrong dimension");
  if (k == 0 && F0.augment(x) != F0.augment(c)) throw Error("elementary_expansion: ε(c) != ε(x)");
  Chain xc = F0.sub(x, c);
  xc.dim = k;
  Chain bd_d;
  if (k + 1 <= F0.top()) bd_d = F0.boundary(d);
  else if (!d.zero()) throw Error("elementary_expansion: d lies above the stored skeleton");
  if (bd_d.t != xc.t) throw Error("elementary_expansion: ∂d != x - c");
  if (xc.zero()) throw Error("elementary_expansion: c = x gives ∂ξ = 0 (inadmissible)");
  auto F = std::make_shared<ChainComplex>(F0);
  while (F->top() < k + 2) {
    F->names.emplace_back();
    F->bd.emplace_back();
  }
  Expansion ex;
  ex.xi = F->rank(k + 1);
  F->names[k + 1].push_back("xi" + std::to_string(ex.xi));
  F->bd[k + 1].push_back(xc);
  ex.eta = F->rank(k + 2);
  F->names[k + 2].push_back("eta" + std::to_string(ex.eta));
  Chain e = d;
  e.dim = k + 1;
  F->add_to(e, F->basis(k + 1, ex.xi), -1);
  e.dim = k + 1;
  F->bd[k + 2].push_back(e);
  F->origin = F0.origin + "+expansion";
  F->validate();
  ex.F = F;
  return ex;
}

ComplexPtr tensor_complex(const ChainComplex& F, const ChainComplex& H) {
  if (!F.K.is_field() || !(F.K == H.K)) throw Error("tensor_complex needs a common field as ground ring");
  auto P = Group::product(F.G, H.G);
  int top = std::min(3, F.top() + H.top());
  std::vector<std::vector<std::string>> names(top + 1);
  std::vector<std::vector<std::array<int, 3>>> idx(top + 1);  // (p, i, j)
  std::vector<std::map<std::array<int, 3>, int>> where(top + 1);  // per total degree
  for (int n = 0; n <= top; ++n)
    for (int p = 0; p <= n; ++p)
      for (int i = 0; i < F.rank(p); ++i)
        for (int j = 0; j < H.rank(n - p); ++j) {
          where[n][{p, i, j}] = static_cast<int>(idx[n].size());
          idx[n].push_back({p, i, j});
          names[n].push_back(F.names[p][i] + "\xE2\x8A\x97" + H.names[n - p][j]);
        }
  auto T = std::make_shared<ChainComplex>();
  T->G = P;
  T->K = F.K;
  T->rankA = F.rankA * H.rankA;
  T->names = names;
  T->bd.resize(top + 1);
  for (int n = 1; n <= top; ++n)
    for (auto [p, i, j] : idx[n]) {
      Chain c;
      c.dim = n - 1;
      int q = n - p;
      if (p >= 1)
        for (auto& [cell, a] : F.bd[p][i].t)
          c.t[Cell{where[n - 1].at({p - 1, cell.x, j}), P->pair(cell.g, H.G->id())}] += a;
      if (q >= 1) {
        Scalar s = (p % 2 == 0) ? 1 : -1;
        for (auto& [cell, a] : H.bd[q][j].t) {
          Cell k{where[n - 1].at({p, i, cell.x}), P->pair(F.G->id(), cell.g)};
          Scalar v = T->K.norm(c.t[k] + s * a);
          if (v == 0)
            c.t.erase(k);
          else
            c.t[k] = v;
        }
      }
      for (auto it = c.t.begin(); it != c.t.end();) it = it->second == 0 ? c.t.erase(it) : std::next(it);
      T->bd[n].push_back(c);
    }
  for (auto [p, i, j] : idx[0]) {
    AVec e;
    for (auto& a : F.eps[i])
      for (auto& b : H.eps[j]) e.push_back(T->K.norm(a * b));
    T->eps.push_back(e);
  }
  T->origin = "tensor";
  T->validate();
  return T;
}

ComplexPtr direct_sum(const ChainComplex& F, const ChainComplex& H) {
  if (!F.G->same_as(*H.G) || !(F.K == H.K)) throw Error("direct_sum needs the same group and ring");
  auto S = std::make_shared<ChainComplex>();
  S->G = F.G;
  S->K = F.K;
  S->rankA = F.rankA + H.rankA;
  int top = std::max(F.top(), H.top());
  S->names.resize(top + 1);
  S->bd.resize(top + 1);
  for (int k = 0; k <= top; ++k) {
    for (int i = 0; i < F.rank(k); ++i) {
      S->names[k].push_back(F.names[k][i] + "'");
      if (k) S->bd[k].push_back(F.bd[k][i]);
    }
    for (int i = 0; i < H.rank(k); ++i) {
      S->names[k].push_back(H.names[k][i] + "''");
      if (k) {
        Chain c;
        c.dim = k - 1;
        for (auto& [cell, a] : H.bd[k][i].t) c.t.emplace(Cell{cell.x + F.rank(k - 1), cell.g}, a);
        S->bd[k].push_back(c);
      }
    }
  }
  for (int i = 0; i < F.rank(0); ++i) {
    AVec e = F.eps[i];
    e.resize(S->rankA, Scalar(0));
    S->eps.push_back(e);
  }
  for (int i = 0; i < H.rank(0); ++i) {
    AVec e(F.rankA, Scalar(0));
    e.insert(e.end(), H.eps[i].begin(), H.eps[i].end());
    S->eps.push_back(e);
  }
  S->origin = "sum";
  S->validate();
  return S;
}

}  // namespace sgm
