#include "sgm/algebra.hpp"

#include <cctype>

namespace sgm {

Ring Ring::prime(long p) {
  if (p < 2) throw Error("GF(p) needs p >= 2");
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) throw Error("GF(p) needs a prime, got " + std::to_string(p));
  return {Kind::Fp, p};
}

Ring Ring::parse(const std::string& s) {
  if (s == "Z" || s == "integers") return integers();
  if (s == "Q" || s == "rationals" || s.empty()) return rationals();
  if (s.rfind("GF(", 0) == 0 && s.back() == ')') return prime(std::stol(s.substr(3, s.size() - 4)));
  throw Error("unknown ground ring '" + s + "'");
}

Scalar Ring::norm(Scalar x) const {
  x.canonicalize();
  switch (kind) {
    case Kind::Q:
      return x;
    case Kind::Z:
      if (x.get_den() != 1) throw Error("non-integral value over Z: " + x.get_str());
      return x;
    case Kind::Fp: {
      mpz_class P(p), n = x.get_num() % P, d = x.get_den() % P;
      if (d == 0) throw Error("denominator divisible by p");
      mpz_class di;
      mpz_invert(di.get_mpz_t(), d.get_mpz_t(), P.get_mpz_t());
      mpz_class r = (n * di) % P;
      if (r < 0) r += P;
      return Scalar(r);
    }
  }
  return x;
}

bool Ring::is_unit(const Scalar& x) const {
  if (x == 0) return false;
  if (kind == Kind::Z) return x == 1 || x == -1;
  return true;
}

Scalar Ring::inv(const Scalar& x) const {
  if (!is_unit(x)) throw Error("not a unit in " + name() + ": " + x.get_str());
  if (kind == Kind::Fp) return norm(Scalar(1) / x);
  return Scalar(1) / x;
}

std::string Ring::name() const {
  switch (kind) {
    case Kind::Z: return "Z";
    case Kind::Q: return "Q";
    case Kind::Fp: return "GF(" + std::to_string(p) + ")";
  }
  return "?";
}

std::string scalar_str(const Scalar& x) { return x.get_str(); }

Scalar parse_scalar(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw Error("empty scalar");
  if (t[0] == '+') t = t.substr(1);
  Scalar r;
  if (r.set_str(t, 10) != 0) throw Error("bad scalar '" + s + "'");
  r.canonicalize();
  return r;
}

void add_term(const Ring& K, Terms& t, const Elem& g, const Scalar& c) {
  if (c == 0) return;
  auto it = t.find(g);
  if (it == t.end()) {
    Scalar v = K.norm(c);
    if (v != 0) t.emplace(g, v);
    return;
  }
  it->second = K.norm(it->second + c);
  if (it->second == 0) t.erase(it);
}

}  // namespace sgm
