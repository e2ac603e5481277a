#pragma once
// hand-rolled generators for the property tests

#include <random>

#include "sgm/complexes.hpp"

namespace gen {

using namespace sgm;

struct Rng {
  std::mt19937_64 r;
  explicit Rng(uint64_t seed) : r(seed) {}
  int64_t range(int64_t lo, int64_t hi) { return std::uniform_int_distribution<int64_t>(lo, hi)(r); }
  bool coin() { return range(0, 1) == 1; }
};

inline Word word(Rng& R, const Group& G, int maxlen) {
  Word w;
  int n = static_cast<int>(R.range(0, maxlen));
  for (int i = 0; i < n; ++i) {
    int64_t e = R.range(-2, 2);
    if (e == 0) e = 1;
    w.emplace_back(static_cast<int>(R.range(0, G.ngens() - 1)), e);
  }
  return w;
}

inline Elem elem(Rng& R, const Group& G, int maxlen = 4) { return G.normal_form(word(R, G, maxlen)); }

inline Scalar scalar(Rng& R, const Ring& K) {
  Scalar a(R.range(-4, 4), R.range(1, K.kind == Ring::Kind::Q ? 3 : 1));
  a.canonicalize();
  return K.norm(a);
}

inline GRElem gr(Rng& R, const GroupRing& A, int terms = 3, int len = 3) {
  GRElem u;
  int n = static_cast<int>(R.range(0, terms));
  for (int i = 0; i < n; ++i) u = A.add(u, A.mono(elem(R, *A.group(), len), scalar(R, A.ring())));
  return u;
}

inline Chain chain(Rng& R, const ChainComplex& F, int dim, int terms = 3, int len = 3) {
  Chain c;
  c.dim = dim;
  int n = static_cast<int>(R.range(0, terms));
  for (int i = 0; i < n && F.rank(dim) > 0; ++i) {
    Chain b = F.basis(dim, static_cast<int>(R.range(0, F.rank(dim) - 1)), elem(R, *F.G, len));
    F.add_to(c, b, scalar(R, F.K));
  }
  c.dim = dim;
  return c;
}

inline std::vector<GroupPtr> backends() {
  return {Group::free_abelian(2), Group::free_group(2), Group::baumslag_solitar(2), Group::baumslag_solitar(3),
          Group::product(Group::free_group(1, {"a"}), Group::free_group(1, {"b"}))};
}

}  // namespace gen
