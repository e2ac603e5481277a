#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Scalar = mpq_class;

// Ground ring K. GF(p) values are kept as integers in [0, p).
struct Ring {
  enum class Kind { Z, Q, Fp };
  Kind kind = Kind::Q;
  long p = 0;

  static Ring integers() { return {Kind::Z, 0}; }
  static Ring rationals() { return {Kind::Q, 0}; }
  static Ring prime(long p);
  static Ring parse(const std::string& s);

  bool is_field() const { return kind != Kind::Z; }
  Scalar norm(Scalar x) const;
  bool is_unit(const Scalar& x) const;
  Scalar inv(const Scalar& x) const;
  std::string name() const;
  bool operator==(const Ring&) const = default;
};

// Normal form of a group element; layout depends on the backend:
//   FreeAbelian(d): d exponents
//   Free(k):        reduced word, letter +-(i+1)
//   BS(1,m):        (p, q, r) for t^-p a^q t^r
//   Product:        [n, left (n entries), right]
using Elem = std::vector<int64_t>;
using Word = std::vector<std::pair<int, int64_t>>;  // (generator index, exponent)

class Group;
using GroupPtr = std::shared_ptr<const Group>;

class Group {
 public:
  enum class Kind { FreeAbelian, Free, BS, Product };

  static GroupPtr free_abelian(int d, std::vector<std::string> names = {});
  static GroupPtr free_group(int k, std::vector<std::string> names = {});
  static GroupPtr baumslag_solitar(int64_t m, std::vector<std::string> names = {});
  static GroupPtr product(GroupPtr g, GroupPtr h);

  Kind kind() const { return kind_; }
  int rank() const { return rank_; }
  int64_t bs_m() const { return m_; }
  int ngens() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& gen_names() const { return names_; }
  int gen_index(const std::string& name) const;
  const GroupPtr& left() const { return left_; }
  const GroupPtr& right() const { return right_; }

  Elem id() const;
  Elem gen(int i, int64_t e = 1) const;
  Elem mul(const Elem& x, const Elem& y) const;
  Elem inv(const Elem& x) const;
  Elem pow(const Elem& x, int64_t k) const;
  bool is_id(const Elem& x) const { return x == id(); }

  Elem normal_form(const Word& w) const;
  Word parse_word(const std::string& s) const;
  Elem parse(const std::string& s) const { return normal_form(parse_word(s)); }
  std::string format(const Elem& x) const;

  // product helpers
  Elem pair(const Elem& g, const Elem& h) const;
  std::pair<Elem, Elem> split(const Elem& x) const;

  // BS(1,m) as the affine map x -> m^e x + c
  void bs_affine(const Elem& x, int64_t& e, mpq_class& c) const;
  Elem bs_from_affine(int64_t e, const mpq_class& c) const;

  // Exponent sums per generator (abelian coordinates). For BS the a-entry is 0.
  std::vector<int64_t> exponent_sums(const Elem& x) const;

  // Ball of radius R in the word metric, BFS order (deterministic).
  std::vector<Elem> ball(int R) const;
  int word_length(const Elem& x, int cap = 64) const;

  std::string spec() const;
  bool same_as(const Group& o) const { return spec() == o.spec(); }

 private:
  Group() = default;
  Kind kind_ = Kind::FreeAbelian;
  int rank_ = 0;
  int64_t m_ = 0;
  std::vector<std::string> names_;
  GroupPtr left_, right_;
};

using Terms = std::map<Elem, Scalar>;

// Finite K-linear combination of group elements, zero entries absent.
struct GRElem {
  Terms t;
  bool zero() const { return t.empty(); }
  bool operator==(const GRElem&) const = default;
};

class GroupRing {
 public:
  GroupRing(GroupPtr G, Ring K) : G_(std::move(G)), K_(K) {}
  const GroupPtr& group() const { return G_; }
  const Ring& ring() const { return K_; }

  GRElem zero() const { return {}; }
  GRElem one() const { return mono(G_->id(), 1); }
  GRElem mono(const Elem& g, const Scalar& c) const;
  GRElem add(const GRElem& u, const GRElem& v) const;
  GRElem sub(const GRElem& u, const GRElem& v) const;
  GRElem neg(const GRElem& u) const;
  GRElem scale(const GRElem& u, const Scalar& c) const;
  GRElem mul(const GRElem& u, const GRElem& v) const;
  GRElem mul(const GRElem& u, const Elem& g) const;   // u * g
  GRElem lmul(const Elem& g, const GRElem& u) const;  // g * u
  std::set<Elem> support(const GRElem& u) const;
  Scalar augmentation(const GRElem& u) const;
  // "3 a^2 - b + 1" style
  GRElem parse(const std::string& s) const;
  std::string format(const GRElem& u) const;

 private:
  GroupPtr G_;
  Ring K_;
};

// helpers shared by modules
void add_term(const Ring& K, Terms& t, const Elem& g, const Scalar& c);
std::string scalar_str(const Scalar& x);
Scalar parse_scalar(const std::string& s);

}  // namespace sgm
