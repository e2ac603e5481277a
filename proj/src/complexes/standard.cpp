#include <algorithm>

#include "sgm/complexes.hpp"

namespace sgm {

Presentation standard_presentation(GroupPtr G) {
  Presentation p;
  p.G = G;
  switch (G->kind()) {
    case Group::Kind::FreeAbelian:
      for (int i = 0; i < G->ngens(); ++i)
        for (int j = i + 1; j < G->ngens(); ++j) {
          p.relators.push_back({{i, 1}, {j, 1}, {i, -1}, {j, -1}});
          p.relator_names.push_back("r" + G->gen_names()[i] + G->gen_names()[j]);
        }
      if (p.relators.size() == 1) p.relator_names = {"r"};
      break;
    case Group::Kind::Free: break;
    case Group::Kind::BS:
      p.relators.push_back({{1, 1}, {0, 1}, {1, -1}, {0, -G->bs_m()}});
      p.relator_names.push_back("r");
      break;
    case Group::Kind::Product: throw Error("direct products have no built-in presentation; use standard_resolution");
  }
  return p;
}

ComplexPtr koszul_resolution(GroupPtr G, Ring K, int N) {
  if (G->kind() != Group::Kind::FreeAbelian) throw Error("Koszul resolution needs a free abelian group");
  int d = G->ngens();
  int top = std::min(d, N);
  bool short_names = std::all_of(G->gen_names().begin(), G->gen_names().end(), [](auto& n) { return n.size() == 1; });
  // subsets of {0..d-1} by size, lexicographic
  std::vector<std::vector<std::vector<int>>> sets(top + 1);
  for (uint32_t mask = 0; mask < (1u << d); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < d; ++i)
      if (mask >> i & 1) s.push_back(i);
    if (static_cast<int>(s.size()) <= top) sets[s.size()].push_back(s);
  }
  for (auto& v : sets) std::sort(v.begin(), v.end());
  auto name = [&](const std::vector<int>& s) {
    if (s.empty()) return std::string("x0");
    std::string n = "x_";
    for (size_t i = 0; i < s.size(); ++i) n += (i && !short_names ? "_" : "") + G->gen_names()[s[i]];
    return n;
  };
  std::vector<std::vector<std::string>> names(top + 1);
  std::vector<std::vector<Chain>> bd(top + 1);
  for (int k = 0; k <= top; ++k)
    for (auto& s : sets[k]) {
      names[k].push_back(name(s));
      if (k == 0) continue;
      Chain c;
      c.dim = k - 1;
      for (size_t p = 0; p < s.size(); ++p) {
        std::vector<int> rest = s;
        rest.erase(rest.begin() + p);
        int idx = static_cast<int>(std::find(sets[k - 1].begin(), sets[k - 1].end(), rest) - sets[k - 1].begin());
        Scalar sg = p % 2 ? -1 : 1;
        // (-1)^p (a_i - 1) x_rest
        c.t[Cell{idx, G->gen(s[p])}] += sg;
        c.t[Cell{idx, G->id()}] -= sg;
      }
      bd[k].push_back(c);
    }
  auto F = resolution_from_tables(G, K, names, bd, {AVec{Scalar(1)}}, 1);
  std::const_pointer_cast<ChainComplex>(F)->origin = "koszul";
  return F;
}

ComplexPtr standard_resolution(GroupPtr G, Ring K, int N) {
  switch (G->kind()) {
    case Group::Kind::FreeAbelian: return koszul_resolution(G, K, N);
    case Group::Kind::Free:
    case Group::Kind::BS: return fox_resolution(standard_presentation(G), K, N);
    case Group::Kind::Product: {
      auto T = tensor_complex(*standard_resolution(G->left(), K, N), *standard_resolution(G->right(), K, N));
      if (!T->G->same_as(*G)) throw Error("tensor resolution group mismatch");
      auto F = std::make_shared<ChainComplex>(*T);
      F->G = G;
      while (F->top() > N) {
        F->names.pop_back();
        F->bd.pop_back();
      }
      return F;
    }
  }
  throw Error("unsupported group");
}

}  // namespace sgm
