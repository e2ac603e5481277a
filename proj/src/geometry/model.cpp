#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sgm/geometry.hpp"

namespace sgm {

namespace {

Q mpow(int64_t m, int64_t k) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(k < 0 ? -k : k));
  return k < 0 ? Q(mpz_class(1), p) : Q(p);
}

mpz_class floor_q(const Q& x) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::string strip_parens(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_on(const std::string& s, char c) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == c) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<Q> parse_qvec(const std::string& s) {
  std::vector<Q> v;
  for (auto& part : split_on(strip_parens(s), ',')) {
    if (part.empty()) throw Error("empty coordinate in '" + s + "'");
    v.push_back(parse_scalar(part));
  }
  return v;
}

std::string qvec_str(const std::vector<Q>& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + scalar_str(v[i]);
  return s + ")";
}

}  // namespace

// ---- Dir ----

Dir Dir::vec(std::vector<Q> u) {
  Dir d;
  d.kind = Kind::Vec;
  d.u = std::move(u);
  return d;
}

Dir Dir::end_omega() {
  Dir d;
  d.kind = Kind::End;
  d.omega = true;
  return d;
}

Dir Dir::end_at(Q x) {
  Dir d;
  d.kind = Kind::End;
  d.x = std::move(x);
  return d;
}

Dir Dir::join(Q w1, Q w2, Dir a, Dir b) {
  if (w1 < 0 || w2 < 0 || (w1 == 0 && w2 == 0)) throw Error("join weights must be >= 0 and not both zero");
  Dir d;
  d.kind = Kind::Join;
  d.w1 = std::move(w1);
  d.w2 = std::move(w2);
  d.sub = {std::move(a), std::move(b)};
  return d;
}

bool Dir::operator==(const Dir& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Vec: return u == o.u;
    case Kind::End: return omega == o.omega && (omega || x == o.x);
    case Kind::Join: return w1 == o.w1 && w2 == o.w2 && sub == o.sub;
  }
  return false;
}

std::string Dir::str() const {
  switch (kind) {
    case Kind::Vec: return qvec_str(u);
    case Kind::End: return omega ? "omega" : "end:" + scalar_str(x);
    case Kind::Join:
      return "join(" + scalar_str(w1) + "," + scalar_str(w2) + ";" + sub[0].str() + ";" + sub[1].str() + ")";
  }
  return "";
}

bool val_less(const Val& a, const Val& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

std::string val_str(const Val& v) { return v ? scalar_str(*v) : "inf"; }

Q dot(const std::vector<Q>& a, const std::vector<Q>& b) {
  if (a.size() != b.size()) throw Error("dimension mismatch");
  Q s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<Q> primitive(const std::vector<Q>& u) {
  mpz_class l = 1, g = 0;
  for (auto& x : u) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  std::vector<mpz_class> z;
  for (auto& x : u) {
    mpz_class v = x.get_num() * (l / x.get_den());
    z.push_back(v);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  if (g == 0) throw Error("zero direction vector");
  std::vector<Q> out;
  for (auto& v : z) out.emplace_back(v / g);
  return out;
}

// ---- Model defaults ----

std::string Model::point_str(const Point& p) const { return qvec_str(p); }

Point Model::parse_point(const std::string& s) const {
  Point p = parse_qvec(s);
  if (p.size() != point_dim()) throw Error("point '" + s + "' has wrong dimension");
  return p;
}

Q busemann_delta(const Model& M, const Dir& e, const Point& p, const Point& q) {
  return M.busemann_delta(e, p, q);
}

// ---- Euclidean ----

EuclideanModel::EuclideanModel(GroupPtr G0, std::vector<std::vector<Q>> t) : tau(std::move(t)) {
  G = std::move(G0);
  if (static_cast<int>(tau.size()) != G->ngens()) throw Error("need one translation vector per generator");
  d = tau.empty() ? 0 : static_cast<int>(tau[0].size());
  if (d < 1) throw Error("Euclidean model needs d >= 1");
  for (auto& v : tau)
    if (static_cast<int>(v.size()) != d) throw Error("translation vectors of unequal dimension");
  // generators invisible to the abelianization (e.g. a in BS(1,m)) must act trivially
  for (int i = 0; i < G->ngens(); ++i) {
    auto s = G->exponent_sums(G->gen(i));
    if (s[i] == 0)
      for (auto& x : tau[i])
        if (x != 0)
          throw Error("translation for generator " + G->gen_names()[i] + " is not a homomorphism (must be 0)");
  }
}

std::vector<Q> EuclideanModel::translation(const Elem& g) const {
  auto s = G->exponent_sums(g);
  std::vector<Q> v(d, Q(0));
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] != 0)
      for (int j = 0; j < d; ++j) v[j] += Q(static_cast<long>(s[i])) * tau[i][j];
  return v;
}

Point EuclideanModel::act(const Elem& g, const Point& p) const {
  auto v = translation(g);
  Point r = p;
  for (int j = 0; j < d; ++j) r[j] += v[j];
  return r;
}

Q EuclideanModel::busemann_delta(const Dir& e, const Point& p, const Point& q) const {
  check_dir(e);
  Q s = 0;
  for (int j = 0; j < d; ++j) s += (p[j] - q[j]) * e.u[j];
  return s;
}

Q EuclideanModel::dist2(const Point& p, const Point& q) const {
  Q s = 0;
  for (int j = 0; j < d; ++j) s += (p[j] - q[j]) * (p[j] - q[j]);
  return s;
}

Q EuclideanModel::scale2(const Dir& e) const {
  check_dir(e);
  return dot(e.u, e.u);
}

void EuclideanModel::check_dir(const Dir& e) const {
  if (e.kind != Dir::Kind::Vec || static_cast<int>(e.u.size()) != d)
    throw Error("direction " + e.str() + " does not belong to a Euclidean model of dimension " + std::to_string(d));
  if (std::all_of(e.u.begin(), e.u.end(), [](const Q& x) { return x == 0; })) throw Error("zero direction");
}

Dir EuclideanModel::canonical(const Dir& e) const {
  check_dir(e);
  return Dir::vec(primitive(e.u));
}

std::optional<Q> EuclideanModel::character(const Dir& e, const Elem& g) const {
  return dot(translation(g), e.u);
}

json EuclideanModel::to_json() const {
  json t = json::array();
  for (auto& v : tau) {
    json r = json::array();
    for (auto& x : v) r.push_back(scalar_str(x));
    t.push_back(r);
  }
  return {{"kind", "euclidean"}, {"dim", d}, {"tau", t}};
}

Dir EuclideanModel::parse_dir(const std::string& s) const {
  Dir e = Dir::vec(parse_qvec(s));
  return canonical(e);
}

// ---- Tree ----

TreeModel::TreeModel(GroupPtr G0) {
  G = std::move(G0);
  if (G->kind() != Group::Kind::BS) throw Error("tree model requires a BaumslagSolitar group");
  m = G->bs_m();
}

Point TreeModel::vertex(int64_t k, const Q& s) const {
  Q M = mpow(m, k);
  Q r = s - Q(floor_q(s / M)) * M;
  return {Q(static_cast<long>(k)), r};
}

int64_t TreeModel::val_m(int64_t m, const Q& y) {
  if (y == 0) throw Error("valuation of 0");
  mpz_class num = y.get_num(), den = y.get_den(), mm = m, g;
  int64_t j = 0;
  for (;;) {
    mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), mm.get_mpz_t());
    if (g == 1) break;
    num *= mm;
    --j;
    mpz_class gg;
    mpz_gcd(gg.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    num /= gg;
    den /= gg;
  }
  while (mpz_divisible_p(num.get_mpz_t(), mm.get_mpz_t())) {
    num /= mm;
    ++j;
  }
  return j;
}

static int64_t level(const Point& p) { return p[0].get_num().get_si(); }

int64_t TreeModel::dist(const Point& p, const Point& q) const {
  int64_t k1 = level(p), k2 = level(q);
  int64_t j = std::min(k1, k2);
  if (p[1] != q[1]) j = std::min(j, val_m(m, p[1] - q[1]));
  return k1 + k2 - 2 * j;
}

Q TreeModel::beta(const Dir& e, const Point& p) const {
  check_dir(e);
  int64_t k = level(p);
  if (e.omega) return Q(static_cast<long>(-k));
  int64_t j = k;
  if (e.x != p[1]) j = std::min(j, val_m(m, e.x - p[1]));
  return Q(static_cast<long>(2 * j - k));
}

Point TreeModel::act(const Elem& g, const Point& p) const {
  int64_t e;
  Q c;
  G->bs_affine(g, e, c);
  return vertex(level(p) + e, mpow(m, e) * p[1] + c);
}

Dir TreeModel::act_dir(const Elem& g, const Dir& d) const {
  check_dir(d);
  if (d.omega) return d;
  int64_t e;
  Q c;
  G->bs_affine(g, e, c);
  return Dir::end_at(mpow(m, e) * d.x + c);
}

Q TreeModel::busemann_delta(const Dir& e, const Point& p, const Point& q) const { return beta(e, p) - beta(e, q); }

Q TreeModel::dist2(const Point& p, const Point& q) const {
  int64_t d = dist(p, q);
  return Q(static_cast<long>(d * d));
}

std::optional<Q> TreeModel::character(const Dir& e, const Elem& g) const {
  check_dir(e);
  if (!e.omega) return std::nullopt;
  int64_t k;
  Q c;
  G->bs_affine(g, k, c);
  return Q(static_cast<long>(-k));
}

void TreeModel::check_dir(const Dir& e) const {
  if (e.kind != Dir::Kind::End) throw Error("direction " + e.str() + " is not a tree end");
}

json TreeModel::to_json() const { return {{"kind", "tree"}, {"m", m}}; }

std::string TreeModel::point_str(const Point& p) const {
  return "v(" + scalar_str(p[0]) + "," + scalar_str(p[1]) + ")";
}

Point TreeModel::parse_point(const std::string& s0) const {
  std::string s = trim(s0);
  if (!s.empty() && s[0] == 'v') s = s.substr(1);
  auto v = parse_qvec(s);
  if (v.size() != 2 || v[0].get_den() != 1) throw Error("tree vertex must be (level, center)");
  return vertex(v[0].get_num().get_si(), v[1]);
}

Dir TreeModel::end_from_word(const std::string& w0) const {
  std::string w;
  for (char c : w0)
    if (!std::isspace(static_cast<unsigned char>(c))) w += c;
  auto open = w.find('(');
  auto close = w.find(')');
  if (open == std::string::npos || close == std::string::npos || close != w.size() - 1 || close == open + 1)
    throw Error("end word '" + w0 + "' needs a nonempty periodic part '(...)' at the end");
  std::string pre = w.substr(0, open), per = w.substr(open + 1, close - open - 1);
  if (per.find_first_not_of('u') == std::string::npos) return Dir::end_omega();
  size_t U = 0;
  while (U < pre.size() && pre[U] == 'u') ++U;
  auto digit = [&](char c) -> int64_t {
    int64_t v = -1;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'z' && c != 'u') v = 10 + (c - 'a');
    if (v < 0 || v >= m) throw Error(std::string("bad digit '") + c + "' in end word for m = " + std::to_string(m));
    return v;
  };
  Q P = 0, Pv = 0;
  for (size_t i = U; i < pre.size(); ++i) P += Q(static_cast<long>(digit(pre[i]))) * mpow(m, static_cast<int64_t>(i - U));
  for (size_t i = 0; i < per.size(); ++i) Pv += Q(static_cast<long>(digit(per[i]))) * mpow(m, static_cast<int64_t>(i));
  int64_t L = static_cast<int64_t>(pre.size() - U), n = static_cast<int64_t>(per.size());
  Q x = P + mpow(m, L) * Pv / (Q(1) - mpow(m, n));
  return Dir::end_at(mpow(m, -static_cast<int64_t>(U)) * x);
}

Dir TreeModel::parse_dir(const std::string& s0) const {
  std::string s = trim(s0);
  if (s == "omega" || s == "w") return Dir::end_omega();
  if (s.rfind("end:", 0) == 0) return Dir::end_at(parse_scalar(s.substr(4)));
  auto bar = s.find('|');
  if (bar != std::string::npos) return act_dir(G->parse(s.substr(0, bar)), end_from_word(s.substr(bar + 1)));
  return end_from_word(s);
}

// ---- Product ----

ProductModel::ProductModel(ModelPtr a, ModelPtr b) : A(std::move(a)), B(std::move(b)) {
  G = Group::product(A->G, B->G);
}

std::pair<Point, Point> ProductModel::split(const Point& p) const {
  size_t n = A->point_dim();
  if (p.size() != point_dim()) throw Error("point has wrong dimension for product model");
  return {Point(p.begin(), p.begin() + n), Point(p.begin() + n, p.end())};
}

Point ProductModel::origin() const {
  Point p = A->origin(), q = B->origin();
  p.insert(p.end(), q.begin(), q.end());
  return p;
}

Point ProductModel::act(const Elem& g, const Point& p) const {
  auto [g1, g2] = G->split(g);
  auto [p1, p2] = split(p);
  Point r = A->act(g1, p1), s = B->act(g2, p2);
  r.insert(r.end(), s.begin(), s.end());
  return r;
}

Dir ProductModel::act_dir(const Elem& g, const Dir& e) const {
  check_dir(e);
  auto [g1, g2] = G->split(g);
  return Dir::join(e.w1, e.w2, A->act_dir(g1, e.sub[0]), B->act_dir(g2, e.sub[1]));
}

Q ProductModel::busemann_delta(const Dir& e, const Point& p, const Point& q) const {
  check_dir(e);
  auto [p1, p2] = split(p);
  auto [q1, q2] = split(q);
  Q s = 0;
  if (e.w1 != 0) s += e.w1 * A->busemann_delta(e.sub[0], p1, q1);
  if (e.w2 != 0) s += e.w2 * B->busemann_delta(e.sub[1], p2, q2);
  return s;
}

Q ProductModel::dist2(const Point& p, const Point& q) const {
  auto [p1, p2] = split(p);
  auto [q1, q2] = split(q);
  return A->dist2(p1, q1) + B->dist2(p2, q2);
}

Q ProductModel::scale2(const Dir& e) const {
  check_dir(e);
  Q s = 0;
  if (e.w1 != 0) s += e.w1 * e.w1 * A->scale2(e.sub[0]);
  if (e.w2 != 0) s += e.w2 * e.w2 * B->scale2(e.sub[1]);
  return s;
}

void ProductModel::check_dir(const Dir& e) const {
  if (e.kind != Dir::Kind::Join || e.sub.size() != 2) throw Error("direction " + e.str() + " is not a join point");
  A->check_dir(e.sub[0]);
  B->check_dir(e.sub[1]);
}

Dir ProductModel::canonical(const Dir& e) const {
  check_dir(e);
  auto w = primitive({e.w1, e.w2});
  // the factor with weight 0 does not matter; pin it so equal joins compare equal
  Dir a = w[0] == 0 ? sample_directions(*A, 1)[0] : A->canonical(e.sub[0]);
  Dir b = w[1] == 0 ? sample_directions(*B, 1)[0] : B->canonical(e.sub[1]);
  return Dir::join(w[0], w[1], a, b);
}

std::optional<Q> ProductModel::character(const Dir& e, const Elem& g) const {
  check_dir(e);
  auto [g1, g2] = G->split(g);
  Q s = 0;
  if (e.w1 != 0) {
    auto c = A->character(e.sub[0], g1);
    if (!c) return std::nullopt;
    s += e.w1 * *c;
  }
  if (e.w2 != 0) {
    auto c = B->character(e.sub[1], g2);
    if (!c) return std::nullopt;
    s += e.w2 * *c;
  }
  return s;
}

json ProductModel::to_json() const { return {{"kind", "product"}, {"left", A->to_json()}, {"right", B->to_json()}}; }

Dir ProductModel::parse_dir(const std::string& s) const {
  auto parts = split_on(strip_parens(s), ';');
  if (parts.size() != 3) throw Error("join point must look like 'w,w';dirA;dirB'");
  auto w = parse_qvec(parts[0]);
  if (w.size() != 2) throw Error("join needs two weights");
  return canonical(Dir::join(w[0], w[1], A->parse_dir(parts[1]), B->parse_dir(parts[2])));
}

// ---- JSON ----

ModelPtr model_from_json(GroupPtr G, const json& j) {
  std::string k = j.at("kind");
  if (k == "euclidean") {
    std::vector<std::vector<Q>> tau;
    for (auto& r : j.at("tau")) {
      std::vector<Q> v;
      for (auto& x : r) v.push_back(x.is_string() ? parse_scalar(x.get<std::string>()) : Q(x.get<long>()));
      tau.push_back(v);
    }
    return std::make_shared<EuclideanModel>(G, tau);
  }
  if (k == "tree") {
    auto M = std::make_shared<TreeModel>(G);
    if (j.contains("m") && j.at("m").get<int64_t>() != M->m) throw Error("tree model m does not match group");
    return M;
  }
  if (k == "product") {
    if (G->kind() != Group::Kind::Product) throw Error("product model needs a DirectProduct group");
    auto M = std::make_shared<ProductModel>(model_from_json(G->left(), j.at("left")),
                                            model_from_json(G->right(), j.at("right")));
    if (!M->G->same_as(*G)) throw Error("product model group mismatch");
    return M;
  }
  throw Error("unknown model kind '" + k + "'");
}

json dir_to_json(const Dir& e) {
  switch (e.kind) {
    case Dir::Kind::Vec: {
      json u = json::array();
      for (auto& x : e.u) u.push_back(scalar_str(x));
      return {{"kind", "vec"}, {"u", u}};
    }
    case Dir::Kind::End:
      if (e.omega) return {{"kind", "end"}, {"omega", true}};
      return {{"kind", "end"}, {"x", scalar_str(e.x)}};
    case Dir::Kind::Join:
      return {{"kind", "join"},
              {"w", {scalar_str(e.w1), scalar_str(e.w2)}},
              {"left", dir_to_json(e.sub[0])},
              {"right", dir_to_json(e.sub[1])}};
  }
  return {};
}

Dir dir_from_json(const json& j) {
  std::string k = j.at("kind");
  if (k == "vec") {
    std::vector<Q> u;
    for (auto& x : j.at("u")) u.push_back(parse_scalar(x.get<std::string>()));
    return Dir::vec(u);
  }
  if (k == "end") {
    if (j.value("omega", false)) return Dir::end_omega();
    return Dir::end_at(parse_scalar(j.at("x").get<std::string>()));
  }
  if (k == "join")
    return Dir::join(parse_scalar(j.at("w").at(0).get<std::string>()), parse_scalar(j.at("w").at(1).get<std::string>()),
                     dir_from_json(j.at("left")), dir_from_json(j.at("right")));
  throw Error("unknown direction kind '" + k + "'");
}

json point_to_json(const Point& p) {
  json a = json::array();
  for (auto& x : p) a.push_back(scalar_str(x));
  return a;
}

Point point_from_json(const json& j) {
  Point p;
  for (auto& x : j) p.push_back(parse_scalar(x.get<std::string>()));
  return p;
}

// ---- orbits and samples ----

namespace {

void orbit_rec(const Model& M, const Dir& e, int depth, const std::vector<int>& gens, std::vector<Dir>& out) {
  auto push = [&](const Dir& d) {
    Dir c = M.canonical(d);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  push(e);
  if (depth <= 0) return;
  const Group& G = *M.G;
  if (auto* P = dynamic_cast<const ProductModel*>(&M)) {
    int nl = P->A->G->ngens();
    std::vector<int> ga, gb;
    for (int g : gens) (g < nl ? ga : gb).push_back(g < nl ? g : g - nl);
    Dir c = M.canonical(e);
    std::vector<Dir> sa, sb;
    if (c.w1 != 0 && !ga.empty()) orbit_rec(*P->A, c.sub[0], depth, ga, sa);
    else sa = {c.sub[0]};
    if (c.w2 != 0 && !gb.empty()) orbit_rec(*P->B, c.sub[1], depth, gb, sb);
    else sb = {c.sub[1]};
    for (auto& a : sa)
      for (auto& b : sb) push(Dir::join(c.w1, c.w2, a, b));
    return;
  }
  // words of length <= depth in the chosen generators
  std::vector<Elem> layer{G.id()}, all{G.id()};
  std::set<Elem> seen{G.id()};
  for (int r = 0; r < depth; ++r) {
    std::vector<Elem> next;
    for (auto& x : layer)
      for (int g : gens)
        for (int s : {1, -1}) {
          Elem y = G.mul(x, G.gen(g, s));
          if (seen.insert(y).second) next.push_back(y);
        }
    all.insert(all.end(), next.begin(), next.end());
    layer.swap(next);
  }
  for (auto& g : all) push(M.act_dir(g, e));
  // attracting fixed points of hyperbolic elements are limits of the orbit
  if (auto* T = dynamic_cast<const TreeModel*>(&M)) {
    for (auto& g : all) {
      int64_t k;
      Q c;
      G.bs_affine(g, k, c);
      if (k == 0) continue;
      Q fix = c / (Q(1) - mpow(T->m, k));
      bool e_repelled = k > 0 ? e.omega : (!e.omega && e.x == fix);
      if (e_repelled) continue;
      push(k > 0 ? Dir::end_at(fix) : Dir::end_omega());
    }
  }
}

}  // namespace

std::vector<Dir> orbit_closure_sample(const Model& M, const Dir& e, int depth, std::vector<int> gens) {
  if (gens.empty())
    for (int i = 0; i < M.G->ngens(); ++i) gens.push_back(i);
  std::vector<Dir> out;
  orbit_rec(M, M.canonical(e), depth, gens, out);
  return out;
}

std::vector<Q> farey_weights(int order) {
  std::set<Q> s;
  for (int q = 1; q <= std::max(order, 1); ++q)
    for (int p = 0; p <= q; ++p) s.insert(Q(p, q));
  return {s.begin(), s.end()};
}

std::vector<Dir> sample_directions(const Model& M, int N, uint64_t seed, int farey_order) {
  std::vector<Dir> out;
  N = std::max(N, 1);
  auto push = [&](const Dir& d) {
    Dir c = M.canonical(d);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  if (auto* E = dynamic_cast<const EuclideanModel*>(&M)) {
    if (E->d == 1) {
      push(Dir::vec({Q(1)}));
      if (N > 1) push(Dir::vec({Q(-1)}));
      return out;
    }
    if (E->d == 2) {
      for (int j = 0; j < N; ++j) {
        double th = 2 * M_PI * j / N;
        long x = std::lround(64 * std::cos(th)), y = std::lround(64 * std::sin(th));
        push(Dir::vec({Q(x), Q(y)}));
      }
      return out;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<Q> e1(E->d, Q(0));
    e1[0] = 1;
    push(Dir::vec(e1));
    for (int tries = 0; static_cast<int>(out.size()) < N && tries < 100 * N; ++tries) {
      std::vector<Q> v;
      bool nz = false;
      for (int j = 0; j < E->d; ++j) {
        long c = std::lround(64 * nd(rng));
        nz |= c != 0;
        v.emplace_back(c);
      }
      if (nz) push(Dir::vec(v));
    }
    return out;
  }
  if (auto* T = dynamic_cast<const TreeModel*>(&M)) {
    push(Dir::end_omega());
    // eventually constant digit words, short prefixes first
    for (int L = 0; static_cast<int>(out.size()) < N && L < 8; ++L) {
      int64_t npre = 1;
      for (int i = 0; i < L; ++i) npre *= T->m;
      for (int64_t code = 0; code < npre && static_cast<int>(out.size()) < N; ++code)
        for (int64_t d = 0; d < T->m && static_cast<int>(out.size()) < N; ++d) {
          std::string w;
          int64_t c = code;
          for (int i = 0; i < L; ++i) {
            int64_t dg = c % T->m;
            c /= T->m;
            w += static_cast<char>(dg < 10 ? '0' + dg : 'a' + dg - 10);
          }
          w += "(" + std::string(1, static_cast<char>(d < 10 ? '0' + d : 'a' + d - 10)) + ")";
          push(T->end_from_word(w));
        }
    }
    return out;
  }
  auto& P = dynamic_cast<const ProductModel&>(M);
  int nf = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(N)))));
  auto sa = sample_directions(*P.A, nf, seed, farey_order);
  auto sb = sample_directions(*P.B, nf, seed + 1, farey_order);
  std::vector<Dir> all;
  for (auto& f : farey_weights(farey_order))
    for (auto& a : sa)
      for (auto& b : sb) {
        Dir c = M.canonical(Dir::join(f, Q(1) - f, a, b));
        if (std::find(all.begin(), all.end(), c) == all.end()) all.push_back(c);
      }
  if (static_cast<int>(all.size()) <= N) return all;
  // evenly spaced subset, endpoints kept
  for (int i = 0; i < N; ++i) push(all[N == 1 ? 0 : static_cast<size_t>(i) * (all.size() - 1) / (N - 1)]);
  return out;
}

Q hausdorff2(const Model& M, const std::vector<Point>& A, const std::vector<Point>& B) {
  if (A.empty() || B.empty()) throw Error("Hausdorff distance of an empty set");
  auto one = [&](const std::vector<Point>& X, const std::vector<Point>& Y) {
    Q worst = 0;
    for (auto& p : X) {
      std::optional<Q> best;
      for (auto& q : Y) {
        Q d = M.dist2(p, q);
        if (!best || d < *best) best = d;
      }
      if (*best > worst) worst = *best;
    }
    return worst;
  };
  return std::max<Q>(one(A, B), one(B, A));
}

}  // namespace sgm
