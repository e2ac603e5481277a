#include <cctype>

#include "sgm/algebra.hpp"

namespace sgm {

GRElem GroupRing::mono(const Elem& g, const Scalar& c) const {
  GRElem u;
  add_term(K_, u.t, g, c);
  return u;
}

GRElem GroupRing::add(const GRElem& u, const GRElem& v) const {
  GRElem w = u;
  for (auto& [g, c] : v.t) add_term(K_, w.t, g, c);
  return w;
}

GRElem GroupRing::sub(const GRElem& u, const GRElem& v) const {
  GRElem w = u;
  for (auto& [g, c] : v.t) add_term(K_, w.t, g, -c);
  return w;
}

GRElem GroupRing::neg(const GRElem& u) const { return scale(u, -1); }

GRElem GroupRing::scale(const GRElem& u, const Scalar& c) const {
  GRElem w;
  for (auto& [g, a] : u.t) add_term(K_, w.t, g, a * c);
  return w;
}

GRElem GroupRing::mul(const GRElem& u, const GRElem& v) const {
  GRElem w;
  for (auto& [g, a] : u.t)
    for (auto& [h, b] : v.t) add_term(K_, w.t, G_->mul(g, h), a * b);
  return w;
}

GRElem GroupRing::mul(const GRElem& u, const Elem& g) const {
  GRElem w;
  for (auto& [h, a] : u.t) add_term(K_, w.t, G_->mul(h, g), a);
  return w;
}

GRElem GroupRing::lmul(const Elem& g, const GRElem& u) const {
  GRElem w;
  for (auto& [h, a] : u.t) add_term(K_, w.t, G_->mul(g, h), a);
  return w;
}

std::set<Elem> GroupRing::support(const GRElem& u) const {
  std::set<Elem> s;
  for (auto& kv : u.t) s.insert(kv.first);
  return s;
}

Scalar GroupRing::augmentation(const GRElem& u) const {
  Scalar s = 0;
  for (auto& kv : u.t) s += kv.second;
  return K_.norm(s);
}

// Terms are separated by top-level + or -; a '-' right after '^' belongs to an exponent.
GRElem GroupRing::parse(const std::string& src) const {
  std::string s;
  for (size_t i = 0; i < src.size(); ++i) {
    if (src.compare(i, 3, "\xE2\x88\x92") == 0) {  // unicode minus
      s += '-';
      i += 2;
    } else {
      s += src[i];
    }
  }
  GRElem out;
  std::vector<std::pair<int, std::string>> terms;
  int sign = 1;
  std::string cur;
  auto flush = [&] {
    size_t a = cur.find_first_not_of(" \t");
    if (a != std::string::npos) terms.emplace_back(sign, cur.substr(a));
    cur.clear();
  };
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool exp_sign = i > 0 && s[i - 1] == '^';
    if ((c == '+' || c == '-') && !exp_sign) {
      flush();
      sign = c == '-' ? -1 : 1;
    } else if (c == '(' || c == ')') {
      throw Error("parentheses not supported in group-ring literal '" + src + "'");
    } else {
      cur += c;
    }
  }
  flush();
  for (auto& [sg, t] : terms) {
    size_t j = 0;
    while (j < t.size() && (std::isdigit(static_cast<unsigned char>(t[j])) || t[j] == '/')) ++j;
    Scalar c = j ? parse_scalar(t.substr(0, j)) : Scalar(1);
    std::string w = t.substr(j);
    size_t k = w.find_first_not_of(" *\t");
    w = k == std::string::npos ? "" : w.substr(k);
    add_term(K_, out.t, w.empty() ? G_->id() : G_->parse(w), c * sg);
  }
  return out;
}

std::string GroupRing::format(const GRElem& u) const {
  if (u.zero()) return "0";
  std::string out;
  for (auto& [g, c] : u.t) {
    bool neg = c < 0;
    Scalar a = neg ? Scalar(-c) : c;
    out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
    bool idg = G_->is_id(g);
    if (a != 1 || idg) out += a.get_str();
    if (!idg) out += (a != 1 ? "*" : "") + G_->format(g);
  }
  return out;
}

}  // namespace sgm
