#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgm/algebra.hpp"
#include "sgm/linalg.hpp"

namespace sgm {

using json = nlohmann::json;

// y = g x with x the basis index in its dimension
struct Cell {
  int x = 0;
  Elem g;
  auto operator<=>(const Cell&) const = default;
};

struct Chain {
  int dim = 0;
  std::map<Cell, Scalar> t;
  bool zero() const { return t.empty(); }
  bool operator==(const Chain&) const = default;
};

// A = K^rank with trivial G-action; augmentation values are vectors in K^rank.
using AVec = std::vector<Scalar>;

struct Presentation {
  GroupPtr G;
  std::vector<Word> relators;
  std::vector<std::string> relator_names;
  std::string module = "trivial";
};

class ChainComplex;
using ComplexPtr = std::shared_ptr<const ChainComplex>;

class ChainComplex {
 public:
  GroupPtr G;
  Ring K;
  int rankA = 1;
  std::vector<std::vector<std::string>> names;  // basis symbols per dimension
  std::vector<std::vector<Chain>> bd;           // bd[k][i] = boundary of x_i in X_k (k >= 1)
  std::vector<AVec> eps;                        // eps[i] for x_i in X_0
  std::string origin = "tables";

  int top() const { return static_cast<int>(names.size()) - 1; }
  int rank(int k) const { return k < 0 || k > top() ? 0 : static_cast<int>(names[k].size()); }
  int index_of(int k, const std::string& name) const;

  Chain basis(int k, int i, const Elem& g) const;
  Chain basis(int k, int i) const { return basis(k, i, G->id()); }
  Chain boundary(const Chain& c) const;
  AVec augment(const Chain& c) const;

  // chain arithmetic
  void add_to(Chain& c, const Chain& d, const Scalar& a = 1) const;
  Chain add(const Chain& c, const Chain& d) const;
  Chain sub(const Chain& c, const Chain& d) const;
  Chain scale(const Chain& c, const Scalar& a) const;
  Chain translate(const Elem& g, const Chain& c) const;
  Chain lmul(const GRElem& u, const Chain& c) const;
  std::string format(const Chain& c) const;
  Chain parse_chain(int dim, const std::string& s) const;  // "(1-b) x_a + (a-1) x_b"

  // throws Error naming the offending cell
  void validate() const;
};

ComplexPtr fox_resolution(const Presentation& p, Ring K = Ring::rationals(), int N = 3);
ComplexPtr resolution_from_tables(GroupPtr G, Ring K, std::vector<std::vector<std::string>> names,
                                  std::vector<std::vector<Chain>> bd, std::vector<AVec> eps,
                                  int rankA = 1);

// Built-in presentations: Z^d with commutators, free groups, BS(1,m) = <a,t | t a t^-1 a^-m>
Presentation standard_presentation(GroupPtr G);
// Koszul complex for free abelian groups (dims <= min(d, N)), Fox for Free and BS,
// tensor product of the factors for direct products.
ComplexPtr standard_resolution(GroupPtr G, Ring K = Ring::rationals(), int N = 3);
ComplexPtr koszul_resolution(GroupPtr G, Ring K, int N = 3);

// Fox derivative of a word w.r.t. generator j, in KG
GRElem fox_derivative(const GroupRing& R, const Word& w, int j);

struct Admissibility {
  bool ok = true;
  std::vector<std::pair<int, int>> offending;  // (dim, index)
};
Admissibility is_admissible(const ChainComplex& F);
ComplexPtr make_admissible(const ChainComplex& F);

struct Expansion {
  ComplexPtr F;
  int xi = -1;   // index in X_1 (or X_{k+1})
  int eta = -1;  // index in X_2 (or X_{k+2})
};
// x is a cell of dimension k, c a k-chain, d a (k+1)-chain with ∂d = x - c (and ε(c) = ε(x) for k = 0)
Expansion elementary_expansion(const ChainComplex& F, const Chain& x, const Chain& c, const Chain& d);

// F ⊗_K F' over the group G x H (field required)
ComplexPtr tensor_complex(const ChainComplex& F, const ChainComplex& Fp);
// direct sum with A = A' ⊕ A''
ComplexPtr direct_sum(const ChainComplex& F, const ChainComplex& Fp);

// JSON (versioned)
inline constexpr int kSchemaVersion = 1;
json group_to_json(const Group& G);
GroupPtr group_from_json(const json& j);
json chain_to_json(const ChainComplex& F, const Chain& c);
Chain chain_from_json(const ChainComplex& F, const json& j);
json complex_to_json(const ChainComplex& F);
ComplexPtr complex_from_json(const json& j);

// Group elements of a chain's support
std::vector<Elem> chain_support_elems(const Chain& c);

}  // namespace sgm
