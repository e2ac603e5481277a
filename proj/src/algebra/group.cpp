#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

#include "sgm/algebra.hpp"

namespace sgm {

namespace {

std::vector<std::string> default_names(int n, const char* base) {
  static const char* letters = "abcdefghijklmnopqrs";
  std::vector<std::string> r;
  for (int i = 0; i < n; ++i)
    r.push_back(n <= 19 ? std::string(1, letters[i]) : std::string(base) + std::to_string(i));
  return r;
}

void check_names(const std::vector<std::string>& names) {
  std::set<std::string> s(names.begin(), names.end());
  if (s.size() != names.size()) throw Error("generator names must be unique");
  for (auto& n : names)
    if (n.empty() || !std::isalpha(static_cast<unsigned char>(n[0])))
      throw Error("bad generator name '" + n + "'");
}

int64_t to_i64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw Error("group exponent overflow");
  return z.get_si();
}

mpq_class mpow(int64_t m, int64_t e) {
  mpz_class b;
  mpz_ui_pow_ui(b.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(e < 0 ? -e : e));
  return e >= 0 ? mpq_class(b) : mpq_class(1, b) ;
}

}  // namespace

GroupPtr Group::free_abelian(int d, std::vector<std::string> names) {
  if (d < 1) throw Error("FreeAbelian needs rank >= 1");
  if (names.empty()) names = default_names(d, "x");
  if (static_cast<int>(names.size()) != d) throw Error("FreeAbelian: name count != rank");
  check_names(names);
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = Kind::FreeAbelian;
  g->rank_ = d;
  g->names_ = names;
  return g;
}

GroupPtr Group::free_group(int k, std::vector<std::string> names) {
  if (k < 1) throw Error("Free needs rank >= 1");
  if (names.empty()) names = default_names(k, "x");
  if (static_cast<int>(names.size()) != k) throw Error("Free: name count != rank");
  check_names(names);
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = Kind::Free;
  g->rank_ = k;
  g->names_ = names;
  return g;
}

GroupPtr Group::baumslag_solitar(int64_t m, std::vector<std::string> names) {
  if (m < 2) throw Error("BS(1,m) needs m >= 2");
  if (names.empty()) names = {"a", "t"};
  if (names.size() != 2) throw Error("BS(1,m) has two generators");
  check_names(names);
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = Kind::BS;
  g->rank_ = 2;
  g->m_ = m;
  g->names_ = names;
  return g;
}

GroupPtr Group::product(GroupPtr a, GroupPtr b) {
  auto g = std::shared_ptr<Group>(new Group());
  g->kind_ = Kind::Product;
  g->names_ = a->gen_names();
  for (auto& n : b->gen_names()) g->names_.push_back(n);
  check_names(g->names_);
  g->rank_ = static_cast<int>(g->names_.size());
  g->left_ = std::move(a);
  g->right_ = std::move(b);
  return g;
}

int Group::gen_index(const std::string& name) const {
  for (int i = 0; i < ngens(); ++i)
    if (names_[i] == name) return i;
  return -1;
}

Elem Group::id() const {
  switch (kind_) {
    case Kind::FreeAbelian: return Elem(rank_, 0);
    case Kind::Free: return {};
    case Kind::BS: return {0, 0, 0};
    case Kind::Product: {
      Elem l = left_->id(), r = right_->id();
      Elem x{static_cast<int64_t>(l.size())};
      x.insert(x.end(), l.begin(), l.end());
      x.insert(x.end(), r.begin(), r.end());
      return x;
    }
  }
  return {};
}

Elem Group::pair(const Elem& g, const Elem& h) const {
  Elem x{static_cast<int64_t>(g.size())};
  x.insert(x.end(), g.begin(), g.end());
  x.insert(x.end(), h.begin(), h.end());
  return x;
}

std::pair<Elem, Elem> Group::split(const Elem& x) const {
  if (kind_ != Kind::Product) throw Error("split on a non-product group");
  auto n = static_cast<size_t>(x.at(0));
  return {Elem(x.begin() + 1, x.begin() + 1 + n), Elem(x.begin() + 1 + n, x.end())};
}

Elem Group::gen(int i, int64_t e) const {
  if (i < 0 || i >= ngens()) throw Error("generator index out of range");
  switch (kind_) {
    case Kind::FreeAbelian: {
      Elem x(rank_, 0);
      x[i] = e;
      return x;
    }
    case Kind::Free: {
      Elem x;
      for (int64_t j = 0; j < (e < 0 ? -e : e); ++j) x.push_back(e < 0 ? -(i + 1) : (i + 1));
      return x;
    }
    case Kind::BS:
      if (i == 0) return bs_from_affine(0, mpq_class(e));
      return bs_from_affine(e, 0);
    case Kind::Product: {
      int nl = left_->ngens();
      if (i < nl) return pair(left_->gen(i, e), right_->id());
      return pair(left_->id(), right_->gen(i - nl, e));
    }
  }
  return {};
}

void Group::bs_affine(const Elem& x, int64_t& e, mpq_class& c) const {
  e = x.at(2) - x.at(0);
  c = mpq_class(x.at(1)) * mpow(m_, -x.at(0));
  c.canonicalize();
}

Elem Group::bs_from_affine(int64_t e, const mpq_class& c0) const {
  mpq_class c = c0;
  c.canonicalize();
  int64_t p = 0;
  mpz_class den = c.get_den();
  while (den != 1) {
    mpz_class g;
    mpz_gcd_ui(g.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(m_));
    if (g == 1) throw Error("translation not in Z[1/m]");
    mpz_class mm(m_), gg;
    mpz_gcd(gg.get_mpz_t(), den.get_mpz_t(), mm.get_mpz_t());
    den /= gg;
    ++p;
  }
  p = std::max<int64_t>(p, -e);
  mpq_class q = c * mpow(m_, p);
  q.canonicalize();
  return {p, to_i64(q.get_num()), e + p};
}

Elem Group::mul(const Elem& x, const Elem& y) const {
  switch (kind_) {
    case Kind::FreeAbelian: {
      Elem z(rank_);
      for (int i = 0; i < rank_; ++i) {
        if (__builtin_add_overflow(x[i], y[i], &z[i])) throw Error("group exponent overflow");
      }
      return z;
    }
    case Kind::Free: {
      Elem z = x;
      for (int64_t l : y) {
        if (!z.empty() && z.back() == -l)
          z.pop_back();
        else
          z.push_back(l);
      }
      return z;
    }
    case Kind::BS: {
      int64_t e1, e2;
      mpq_class c1, c2;
      bs_affine(x, e1, c1);
      bs_affine(y, e2, c2);
      mpq_class c = mpow(m_, e1) * c2 + c1;
      return bs_from_affine(e1 + e2, c);
    }
    case Kind::Product: {
      auto [a1, b1] = split(x);
      auto [a2, b2] = split(y);
      return pair(left_->mul(a1, a2), right_->mul(b1, b2));
    }
  }
  return {};
}

Elem Group::inv(const Elem& x) const {
  switch (kind_) {
    case Kind::FreeAbelian: {
      Elem z(rank_);
      for (int i = 0; i < rank_; ++i) z[i] = -x[i];
      return z;
    }
    case Kind::Free: {
      Elem z(x.rbegin(), x.rend());
      for (auto& l : z) l = -l;
      return z;
    }
    case Kind::BS: {
      int64_t e;
      mpq_class c;
      bs_affine(x, e, c);
      // x^-1 : y -> m^-e (y - c)
      return bs_from_affine(-e, -mpow(m_, -e) * c);
    }
    case Kind::Product: {
      auto [a, b] = split(x);
      return pair(left_->inv(a), right_->inv(b));
    }
  }
  return {};
}

Elem Group::pow(const Elem& x, int64_t k) const {
  Elem base = k < 0 ? inv(x) : x, r = id();
  for (int64_t n = k < 0 ? -k : k; n > 0; n >>= 1) {
    if (n & 1) r = mul(r, base);
    if (n > 1) base = mul(base, base);
  }
  return r;
}

Elem Group::normal_form(const Word& w) const {
  Elem r = id();
  for (auto& [i, e] : w) r = mul(r, gen(i, e));
  return r;
}

Word Group::parse_word(const std::string& s0) const {
  std::string s;
  for (size_t i = 0; i < s0.size(); ++i) {
    // accept the unicode superscript "⁻¹"
    if (s0.compare(i, 5, "\xE2\x81\xBB\xC2\xB9") == 0) {
      s += "^-1";
      i += 4;
    } else if (s0[i] == '*' || s0[i] == '.') {
      s += ' ';
    } else {
      s += s0[i];
    }
  }
  bool single = std::all_of(names_.begin(), names_.end(), [](auto& n) { return n.size() == 1; });
  Word w;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    if (tok == "1" || tok == "e") continue;
    std::string name = tok;
    int64_t e = 1;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      name = tok.substr(0, caret);
      try {
        e = std::stoll(tok.substr(caret + 1));
      } catch (...) {
        throw Error("bad exponent in '" + tok + "'");
      }
    }
    int idx = gen_index(name);
    if (idx >= 0) {
      w.emplace_back(idx, e);
      continue;
    }
    if (!single) throw Error("unknown generator '" + name + "'");
    for (size_t j = 0; j < name.size(); ++j) {
      int k = gen_index(std::string(1, name[j]));
      if (k < 0) throw Error("unknown generator '" + std::string(1, name[j]) + "'");
      w.emplace_back(k, j + 1 == name.size() ? e : 1);
    }
  }
  return w;
}

namespace {
void put(std::string& out, const std::string& name, int64_t e) {
  if (e == 0) return;
  if (!out.empty()) out += ' ';
  out += name;
  if (e != 1) out += "^" + std::to_string(e);
}
}  // namespace

std::string Group::format(const Elem& x) const {
  std::string out;
  switch (kind_) {
    case Kind::FreeAbelian:
      for (int i = 0; i < rank_; ++i) put(out, names_[i], x[i]);
      break;
    case Kind::Free:
      for (size_t i = 0; i < x.size();) {
        size_t j = i;
        while (j < x.size() && x[j] == x[i]) ++j;
        int64_t l = x[i];
        put(out, names_[std::abs(l) - 1], (l > 0 ? 1 : -1) * static_cast<int64_t>(j - i));
        i = j;
      }
      break;
    case Kind::BS:
      put(out, names_[1], -x[0]);
      put(out, names_[0], x[1]);
      put(out, names_[1], x[2]);
      break;
    case Kind::Product: {
      auto [a, b] = split(x);
      std::string l = left_->format(a), r = right_->format(b);
      if (a != left_->id()) out = l;
      if (b != right_->id()) out += (out.empty() ? "" : " ") + r;
      break;
    }
  }
  return out.empty() ? "1" : out;
}

std::vector<int64_t> Group::exponent_sums(const Elem& x) const {
  switch (kind_) {
    case Kind::FreeAbelian: return x;
    case Kind::Free: {
      std::vector<int64_t> s(rank_, 0);
      for (int64_t l : x) s[std::abs(l) - 1] += l > 0 ? 1 : -1;
      return s;
    }
    case Kind::BS: return {0, x[2] - x[0]};
    case Kind::Product: {
      auto [a, b] = split(x);
      auto s = left_->exponent_sums(a);
      auto t = right_->exponent_sums(b);
      s.insert(s.end(), t.begin(), t.end());
      return s;
    }
  }
  return {};
}

std::vector<Elem> Group::ball(int R) const {
  std::vector<Elem> out{id()};
  std::set<Elem> seen{id()};
  size_t lo = 0;
  for (int r = 0; r < R; ++r) {
    size_t hi = out.size();
    for (size_t i = lo; i < hi; ++i)
      for (int g = 0; g < ngens(); ++g)
        for (int s : {1, -1}) {
          Elem y = mul(out[i], gen(g, s));
          if (seen.insert(y).second) out.push_back(y);
        }
    lo = hi;
  }
  return out;
}

int Group::word_length(const Elem& x, int cap) const {
  switch (kind_) {
    case Kind::FreeAbelian: {
      int64_t s = 0;
      for (auto v : x) s += std::abs(v);
      return static_cast<int>(s);
    }
    case Kind::Free: return static_cast<int>(x.size());
    case Kind::Product: {
      auto [a, b] = split(x);
      return left_->word_length(a, cap) + right_->word_length(b, cap);
    }
    case Kind::BS: {
      std::set<Elem> seen{id()};
      std::vector<Elem> layer{id()};
      for (int r = 0; r <= cap; ++r) {
        for (auto& y : layer)
          if (y == x) return r;
        std::vector<Elem> next;
        for (auto& y : layer)
          for (int g = 0; g < 2; ++g)
            for (int s : {1, -1}) {
              Elem z = mul(y, gen(g, s));
              if (seen.insert(z).second) next.push_back(z);
            }
        layer.swap(next);
      }
      return cap + 1;
    }
  }
  return 0;
}

std::string Group::spec() const {
  std::string names;
  for (auto& n : names_) names += (names.empty() ? "" : ",") + n;
  switch (kind_) {
    case Kind::FreeAbelian: return "FreeAbelian(" + std::to_string(rank_) + ")[" + names + "]";
    case Kind::Free: return "Free(" + std::to_string(rank_) + ")[" + names + "]";
    case Kind::BS: return "BS(1," + std::to_string(m_) + ")[" + names + "]";
    case Kind::Product: return "DirectProduct(" + left_->spec() + "," + right_->spec() + ")";
  }
  return "?";
}

}  // namespace sgm
