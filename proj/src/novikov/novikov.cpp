#include "sgm/novikov.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sgm {

Q Character::operator()(const Elem& g) const {
  auto s = G->exponent_sums(g);
  Q v = 0;
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] != 0) v += on_gens[i] * Q(static_cast<long>(s[i]));
  return v;
}

std::optional<Character> discrete_character(const Model& M, const Dir& e, std::string* why) {
  if (!M.translation_action()) {
    if (why) *why = "Novikov computations need a translation action (tree ends are out of scope)";
    return std::nullopt;
  }
  Character c;
  c.G = M.G;
  for (int i = 0; i < M.G->ngens(); ++i) {
    auto v = M.character(e, M.G->gen(i));
    if (!v) {
      if (why) *why = "no character toward " + e.str();
      return std::nullopt;
    }
    c.on_gens.push_back(*v);
  }
  // exponent sums ignore generators that die in the abelianization; they must carry 0
  for (int i = 0; i < M.G->ngens(); ++i)
    if (c(M.G->gen(i)) != c.on_gens[i]) {
      if (why) *why = "character does not factor through exponent sums";
      return std::nullopt;
    }
  return c;
}

// ---- truncated Novikov ring ----

NovikovRing::NovikovRing(GroupPtr G, Ring K, Character chi) : G_(std::move(G)), K_(K), chi_(std::move(chi)) {}

void NovikovRing::clip(NovElem& u) const {
  if (!u.floor) return;
  for (auto it = u.t.begin(); it != u.t.end();)
    if (val(it->first) >= *u.floor)
      it = u.t.erase(it);
    else
      ++it;
}

Val NovikovRing::min_val(const NovElem& u) const {
  Val m;
  for (auto& [g, c] : u.t) {
    Q v = val(g);
    if (!m || v < *m) m = v;
  }
  return m;
}

NovElem NovikovRing::from(const GRElem& u, Val floor) const {
  NovElem r{u.t, floor};
  clip(r);
  return r;
}

NovElem NovikovRing::truncate(const NovElem& u, const Q& T) const {
  NovElem r = u;
  if (!r.floor || T < *r.floor) r.floor = T;
  clip(r);
  return r;
}

NovElem NovikovRing::one() const { return from(GroupRing(G_, K_).one()); }

static Val vmin(const Val& a, const Val& b) { return val_less(a, b) ? a : b; }
static Val vadd(const Val& a, const Val& b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

NovElem NovikovRing::add(const NovElem& u, const NovElem& v) const {
  NovElem r = u;
  r.floor = vmin(u.floor, v.floor);
  for (auto& [g, c] : v.t) add_term(K_, r.t, g, c);
  clip(r);
  return r;
}

NovElem NovikovRing::neg(const NovElem& u) const {
  NovElem r = u;
  for (auto& [g, c] : r.t) c = K_.norm(-c);
  return r;
}

NovElem NovikovRing::sub(const NovElem& u, const NovElem& v) const { return add(u, neg(v)); }

NovElem NovikovRing::mul(const NovElem& u, const NovElem& v) const {
  // (U + α)(V + β) with α ≥ fu, β ≥ fv
  NovElem r;
  r.floor = vmin(vmin(vadd(min_val(u), v.floor), vadd(u.floor, min_val(v))), vadd(u.floor, v.floor));
  for (auto& [g, a] : u.t) {
    Q vg = val(g);
    for (auto& [h, b] : v.t) {
      if (r.floor && vg + val(h) >= *r.floor) continue;
      add_term(K_, r.t, G_->mul(g, h), a * b);
    }
  }
  return r;
}

bool NovikovRing::is_unit(const NovElem& u) const {
  Val m = min_val(u);
  if (!m || (u.floor && *m >= *u.floor)) return false;
  int count = 0;
  Scalar lead;
  for (auto& [g, c] : u.t)
    if (val(g) == *m) {
      ++count;
      lead = c;
    }
  return count == 1 && K_.is_unit(lead);
}

NovElem NovikovRing::invert_if_unit(const NovElem& u, const Q& T) const {
  if (!is_unit(u)) throw Error("not a unit: the lowest stratum of " + format(u) + " is not a single invertible term");
  Q m0 = *min_val(u);
  Elem g0;
  Scalar c0;
  for (auto& [g, c] : u.t)
    if (val(g) == m0) {
      g0 = g;
      c0 = c;
    }
  // u = c0 g0 (1 - w)
  NovElem lead_inv{Terms{{G_->inv(g0), K_.inv(c0)}}, std::nullopt};
  NovElem w = sub(one(), mul(lead_inv, u));
  Q target = T + m0;
  if (w.floor && *w.floor < target) target = *w.floor;
  NovElem s = truncate(one(), target), p = s;
  for (;;) {
    p = truncate(mul(p, w), target);
    if (p.t.empty()) break;
    s = add(s, p);
  }
  NovElem r = mul(s, lead_inv);
  return truncate(r, target - m0);
}

bool NovikovRing::agree_below(const NovElem& u, const NovElem& v, const Q& T) const {
  Q f = T;
  if (u.floor && *u.floor < f) f = *u.floor;
  if (v.floor && *v.floor < f) f = *v.floor;
  return truncate(u, f).t == truncate(v, f).t;
}

std::string NovikovRing::format(const NovElem& u) const {
  std::string s = GroupRing(G_, K_).format(GRElem{u.t});
  if (u.floor) s += " + O(" + scalar_str(*u.floor) + ")";
  return s;
}

json NovikovRing::to_json(const NovElem& u) const {
  json terms = json::array();
  for (auto& [g, c] : u.t) terms.push_back({G_->format(g), scalar_str(c)});
  return {{"terms", terms}, {"floor", val_str(u.floor)}};
}

// ---- truncated Novikov complex and cancellation ----

namespace {

using Row = std::vector<NovElem>;

struct Reduced {
  // live basis indices per dim, matrices D[j][x][y] indexed by original indices
  std::vector<std::vector<int>> live;
  std::vector<std::vector<Row>> D;
  // representative of each live basis element of dim k in original coordinates
  std::vector<Row> rep;
  std::vector<std::string> transcript;
  bool undecided = false;  // an entry's lowest term sits at or above its floor
};

GRElem entry(const ChainComplex& F, const Chain& c, int y) {
  GRElem r;
  for (auto& [cell, a] : c.t)
    if (cell.x == y) add_term(F.K, r.t, cell.g, a);
  return r;
}

Q boundary_pad(const ChainComplex& F, const Character& chi, int top) {
  Q M = 0;
  for (int j = 1; j <= top; ++j)
    for (auto& c : F.bd[j])
      for (auto& [cell, a] : c.t) {
        Q v = chi(cell.g);
        if (v < 0) v = -v;
        if (v > M) M = v;
      }
  return M * (top + 1);
}

Reduced reduce(const NovikovRing& R, const ChainComplex& F, int k, const Q& T) {
  int top = std::min(k + 1, F.top());
  Reduced r;
  r.live.resize(top + 1);
  r.D.resize(top + 1);
  for (int j = 0; j <= top; ++j)
    for (int i = 0; i < F.rank(j); ++i) r.live[j].push_back(i);
  for (int j = 1; j <= top; ++j) {
    r.D[j].assign(F.rank(j), Row(F.rank(j - 1)));
    for (int x = 0; x < F.rank(j); ++x)
      for (int y = 0; y < F.rank(j - 1); ++y) r.D[j][x][y] = R.truncate(R.from(entry(F, F.bd[j][x], y)), T);
  }
  if (k <= top) {
    r.rep.assign(F.rank(k), Row(F.rank(k), NovElem{{}, T}));
    for (int i = 0; i < F.rank(k); ++i) r.rep[i][i] = R.truncate(R.one(), T);
  }
  auto pick = [&]() -> std::tuple<int, int, int> {
    std::tuple<int, int, int> best{-1, -1, -1};
    size_t best_size = 0;
    for (int j = 1; j <= top; ++j)
      for (int x : r.live[j])
        for (int y : r.live[j - 1]) {
          auto& u = r.D[j][x][y];
          if (!R.is_unit(u)) continue;
          if (std::get<0>(best) < 0 || u.t.size() < best_size) {
            best = {j, x, y};
            best_size = u.t.size();
          }
        }
    return best;
  };
  for (;;) {
    auto [j, x, y] = pick();
    if (j < 0) break;
    const NovElem u = r.D[j][x][y];
    std::optional<NovElem> uinv;
    auto inv = [&]() -> const NovElem& {
      if (!uinv) uinv = R.invert_if_unit(u, T);
      return *uinv;
    };
    for (int x2 : r.live[j]) {
      if (x2 == x || R.known_zero(r.D[j][x2][y])) continue;
      NovElem f = R.mul(r.D[j][x2][y], inv());
      for (int y2 : r.live[j - 1])
        if (y2 != y && !R.known_zero(r.D[j][x][y2]))
          r.D[j][x2][y2] = R.truncate(R.sub(r.D[j][x2][y2], R.mul(f, r.D[j][x][y2])), T);
      if (j == k) {
        auto& a = r.rep[x2];
        for (size_t c = 0; c < a.size(); ++c) a[c] = R.truncate(R.sub(a[c], R.mul(f, r.rep[x][c])), T);
      }
    }
    r.transcript.push_back("cancel " + F.names[j][x] + " against " + F.names[j - 1][y] + " via unit " + R.format(u));
    std::erase(r.live[j], x);
    std::erase(r.live[j - 1], y);
  }
  for (int j = 1; j <= top; ++j)
    for (int x : r.live[j])
      for (int y : r.live[j - 1]) {
        auto& u = r.D[j][x][y];
        auto m = R.min_val(u);
        if (u.floor && (!m || *m >= *u.floor) && *u.floor < T) r.undecided = true;
      }
  return r;
}

// z ∈ ∂(window (k+1)-chains) modulo valuation ≥ T?
bool in_image_on_window(const NovikovRing& R, const ChainComplex& F, int k, const std::vector<NovElem>& z, const Q& T,
                        int radius) {
  if (k + 1 > F.top() || F.rank(k + 1) == 0) return false;
  const Group& G = *F.G;
  std::set<Elem> centers{G.id()};
  for (auto& c : z)
    for (auto& [g, a] : c.t) centers.insert(g);
  Q pad = 0;
  for (auto& c : F.bd[k + 1])
    for (auto& [cell, a] : c.t) pad = std::max(pad, R.val(cell.g) < 0 ? Q(-R.val(cell.g)) : R.val(cell.g));
  auto B = G.ball(radius);
  std::set<Elem> W;
  for (auto& s : centers)
    for (auto& h : B) {
      Elem g = G.mul(s, h);
      if (R.val(g) < T + pad) W.insert(g);
    }
  Indexer<Cell> rows;
  SpanSolver S(F.K);
  auto vec_of = [&](const Chain& c) {
    SparseVec v;
    for (auto& [cell, a] : c.t)
      if (R.val(cell.g) < T) v.emplace_back(rows.get(cell), a);
    std::sort(v.begin(), v.end(), [](auto& p, auto& q) { return p.first < q.first; });
    return v;
  };
  for (auto& g : W)
    for (int i = 0; i < F.rank(k + 1); ++i) S.add(vec_of(F.boundary(F.basis(k + 1, i, g))));
  Chain zc;
  zc.dim = k;
  for (int i = 0; i < F.rank(k); ++i)
    for (auto& [g, a] : z[i].t) F.add_to(zc, F.basis(k, i, g), a);
  return S.in_span(vec_of(zc));
}

struct Attempt {
  TorResult::Status status = TorResult::Status::Unknown;
  std::vector<NovElem> witness;
  bool image_exact = false;
  std::string reason;
  std::vector<std::string> transcript;
};

Attempt attempt(const NovikovRing& R, const ChainComplex& F, int k, const Q& T, int radius) {
  Attempt a;
  if (k > F.top()) {
    a.status = TorResult::Status::Vanishes;
    a.reason = "the resolution has no cells in dimension " + std::to_string(k);
    return a;
  }
  Q Tw = T + boundary_pad(F, R.chi(), std::min(k + 1, F.top()));
  Reduced r = reduce(R, F, k, Tw);
  a.transcript = r.transcript;
  if (r.live[k].empty()) {
    a.status = TorResult::Status::Vanishes;
    return a;
  }
  for (int y : r.live[k]) {
    bool cycle = true;
    if (k >= 1)
      for (int y2 : r.live[k - 1])
        if (!R.known_zero(r.D[k][y][y2])) cycle = false;
    if (!cycle) continue;
    a.witness.clear();
    // keep the padding so that ∂z is exact below T
    for (auto& c : r.rep[y]) a.witness.push_back(R.truncate(c, Tw));
    bool exact = true;
    if (k + 1 <= F.top())
      for (int x : r.live[k + 1])
        if (!R.known_zero(r.D[k + 1][x][y])) exact = false;
    if (!exact && in_image_on_window(R, F, k, a.witness, T, radius)) continue;
    a.image_exact = exact;
    a.status = TorResult::Status::Obstruction;
    a.transcript.push_back("survivor " + F.names[k][y] + (exact ? ": no cell of dimension " + std::to_string(k + 1) + " reaches it"
                                                                 : ": not a boundary on ball(" + std::to_string(radius) + ") below the floor"));
    return a;
  }
  a.reason = r.undecided ? "an entry's leading term is hidden by truncation" : "surviving cells without a certified cycle";
  return a;
}

Val boundary_floor(const NovikovRing& R, const ChainComplex& F, int k, const std::vector<NovElem>& z) {
  if (k == 0) {
    // Tor_0: every chain is a cycle of the unaugmented complex
    return std::nullopt;
  }
  Val worst;
  for (int y = 0; y < F.rank(k - 1); ++y) {
    NovElem s{{}, std::nullopt};
    for (int x = 0; x < F.rank(k); ++x) s = R.add(s, R.mul(z[x], R.from(entry(F, F.bd[k][x], y))));
    // a surviving term caps the floor at its valuation
    Val f = s.floor;
    if (auto m = R.min_val(s); val_less(m, f)) f = m;
    if (val_less(f, worst)) worst = f;
  }
  return worst;
}

}  // namespace

const char* status_name(TorResult::Status s) {
  switch (s) {
    case TorResult::Status::Vanishes: return "Vanishes";
    case TorResult::Status::Obstruction: return "Obstruction";
    case TorResult::Status::Unknown: return "Unknown";
  }
  return "?";
}

json TorResult::to_json(const NovikovRing& R, const ChainComplex& F) const {
  json j = {{"k", k}, {"status", status_name(status)}, {"T", scalar_str(T)}};
  if (!reason.empty()) j["reason"] = reason;
  if (status == Status::Obstruction) {
    json w = json::object();
    for (size_t i = 0; i < witness.size(); ++i)
      if (!witness[i].t.empty()) w[F.names[k][i]] = R.to_json(witness[i]);
    j["witness"] = w;
    j["boundary_floor"] = val_str(boundary_floor);
    j["image"] = image_exact ? json("exact") : json({{"window", image_window}});
  }
  j["transcript"] = transcript;
  return j;
}

TorResult tor_vanishing_test(const ControlledModel& cm, const Dir& e, int k, const NovikovOptions& opt) {
  TorResult res;
  res.k = k;
  res.T = opt.T;
  std::string why;
  auto chi = discrete_character(*cm.M, e, &why);
  if (!chi) {
    res.reason = why;
    return res;
  }
  if (k < 0) {
    res.status = TorResult::Status::Vanishes;
    return res;
  }
  NovikovRing R(cm.F->G, cm.F->K, *chi);
  Attempt a = attempt(R, *cm.F, k, opt.T, opt.window);
  Attempt b = attempt(R, *cm.F, k, opt.T * 2, opt.window);
  res.transcript = a.transcript;
  if (a.status == TorResult::Status::Vanishes && b.status == TorResult::Status::Vanishes) {
    res.status = TorResult::Status::Vanishes;
    res.reason = a.reason;
    return res;
  }
  if (a.status == TorResult::Status::Obstruction && b.status == TorResult::Status::Obstruction) {
    bool match = a.witness.size() == b.witness.size();
    for (size_t i = 0; match && i < a.witness.size(); ++i) match = R.agree_below(a.witness[i], b.witness[i], opt.T);
    if (match) {
      res.status = TorResult::Status::Obstruction;
      res.witness = a.witness;
      res.image_exact = a.image_exact && b.image_exact;
      res.image_window = res.image_exact ? -1 : opt.window;
      res.boundary_floor = boundary_floor(R, *cm.F, k, res.witness);
      res.transcript.push_back("witness stable from T = " + scalar_str(opt.T) + " to " + scalar_str(opt.T * 2));
      if (val_less(res.boundary_floor, Val(opt.T))) {
        res.status = TorResult::Status::Unknown;
        res.reason = "witness is a cycle only below " + val_str(res.boundary_floor);
      }
      return res;
    }
    res.reason = "witness changed between T and 2T";
    return res;
  }
  res.reason = a.status == b.status ? a.reason : "verdict not stable between T and 2T";
  return res;
}

std::vector<TorResult> tor_profile(const ControlledModel& cm, const Dir& e, int n, const NovikovOptions& opt) {
  std::vector<TorResult> out;
  for (int k = 0; k <= n; ++k) out.push_back(tor_vanishing_test(cm, e, k, opt));
  return out;
}

bool verify_obstruction(const ControlledModel& cm, const Dir& e, const TorResult& r, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (r.status != TorResult::Status::Obstruction) return fail("not an obstruction");
  auto chi = discrete_character(*cm.M, e);
  if (!chi) return fail("no discrete character");
  NovikovRing R(cm.F->G, cm.F->K, *chi);
  const auto& F = *cm.F;
  if (static_cast<int>(r.witness.size()) != F.rank(r.k)) return fail("witness has the wrong rank");
  bool nonzero = false;
  for (auto& c : r.witness) nonzero |= !c.t.empty();
  if (!nonzero) return fail("witness is zero");
  Val f = boundary_floor(R, F, r.k, r.witness);
  if (val_less(f, Val(r.T))) return fail("∂z is not 0 below T = " + scalar_str(r.T));
  if (!r.image_exact && in_image_on_window(R, F, r.k, r.witness, r.T, r.image_window))
    return fail("witness is a boundary on the recorded window");
  if (r.image_exact) {
    // replay: the reduction must leave the witness's cell untouched by dimension k+1
    Attempt a = attempt(R, F, r.k, r.T, std::max(r.image_window, 1));
    if (a.status != TorResult::Status::Obstruction) return fail("replay of the elimination does not reach an obstruction");
  }
  return true;
}

json LipschitzReport::to_json() const { return {{"ok", ok}, {"samples", samples}, {"violations", violations}}; }

LipschitzReport lipschitz_check(const ControlledModel& cm, const Dir& e, const FinitaryMap& sigma, const Q& nu2,
                                const Window& w) {
  LipschitzReport rep;
  const auto& F = *sigma.src;
  auto wc = window_cells(F, w, 0, sigma.hi());
  std::set<std::pair<int, Cell>> cells(wc.begin(), wc.end());
  for (auto& [key, c] : sigma.overrides) cells.insert(key);
  for (auto& [k, y] : cells) {
    ++rep.samples;
    Val vs = cm.valuation(e, sigma.apply_cell(k, y));
    if (!vs) continue;
    Q loss = *cm.valuation(e, k, y) - *vs;
    if (loss > 0 && loss * loss > nu2)
      rep.violations.push_back(F.names[k][y.x] + " at " + F.G->format(y.g) + " loses " + scalar_str(loss));
  }
  rep.ok = rep.violations.empty();
  return rep;
}

json LesReport::to_json() const {
  json f = json::array();
  for (auto& row : flags) {
    json r = json::array();
    for (auto s : row) r.push_back(status_name(s));
    f.push_back(r);
  }
  return {{"ok", ok}, {"lines", lines}, {"flags", f}};
}

LesReport les_consistency(const ControlledModel& cm_sub, const ControlledModel& cm_mid, const ControlledModel& cm_quo,
                          const Dir& e, int n, const NovikovOptions& opt) {
  LesReport rep;
  for (auto* cm : {&cm_sub, &cm_mid, &cm_quo}) {
    rep.flags.emplace_back();
    for (int k = 0; k <= n + 1; ++k) rep.flags.back().push_back(tor_vanishing_test(*cm, e, k, opt).status);
  }
  using S = TorResult::Status;
  auto V = [&](int m, int k) -> std::optional<bool> {
    if (k < 0) return true;
    S s = rep.flags[m][k];
    if (s == S::Unknown) return std::nullopt;
    return s == S::Vanishes;
  };
  auto check = [&](std::optional<bool> p, std::optional<bool> q, std::optional<bool> concl, const std::string& what) {
    if (!p || !q || !concl) return;
    if (*p && *q && !*concl) {
      rep.ok = false;
      rep.lines.push_back("violated: " + what);
    }
  };
  // Tor_k(A') → Tor_k(A) → Tor_k(A'') → Tor_{k-1}(A')
  for (int k = 0; k <= n + 1; ++k) {
    check(V(0, k), V(2, k), V(1, k), "Tor_" + std::to_string(k) + "(A'), Tor_" + std::to_string(k) + "(A'') vanish but Tor_" + std::to_string(k) + "(A) does not");
    if (k <= n) check(V(1, k), V(2, k + 1), V(0, k), "Tor_" + std::to_string(k) + "(A), Tor_" + std::to_string(k + 1) + "(A'') vanish but Tor_" + std::to_string(k) + "(A') does not");
    check(V(1, k), V(0, k - 1), V(2, k), "Tor_" + std::to_string(k) + "(A), Tor_" + std::to_string(k - 1) + "(A') vanish but Tor_" + std::to_string(k) + "(A'') does not");
  }
  if (rep.ok) rep.lines.push_back("all implications of the long exact sequence hold");
  return rep;
}

}  // namespace sgm
