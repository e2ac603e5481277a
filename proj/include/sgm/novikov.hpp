#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgm/finitary.hpp"

namespace sgm {

// χ(g) = β_e(g p) - β_e(p) for a translation action, stored on generators.
struct Character {
  GroupPtr G;
  std::vector<Q> on_gens;
  Q operator()(const Elem& g) const;
};

// nullopt (with a reason) unless M acts by translations and e has a rational character
std::optional<Character> discrete_character(const Model& M, const Dir& e, std::string* why = nullptr);

// t modulo everything of valuation >= floor (nullopt floor: exact)
struct NovElem {
  Terms t;
  Val floor;
};

class NovikovRing {
 public:
  NovikovRing(GroupPtr G, Ring K, Character chi);
  const Character& chi() const { return chi_; }
  const Ring& ring() const { return K_; }

  Q val(const Elem& g) const { return chi_(g); }
  Val min_val(const NovElem& u) const;
  NovElem from(const GRElem& u, Val floor = std::nullopt) const;
  NovElem truncate(const NovElem& u, const Q& T) const;
  NovElem one() const;

  NovElem add(const NovElem& u, const NovElem& v) const;
  NovElem sub(const NovElem& u, const NovElem& v) const;
  NovElem neg(const NovElem& u) const;
  NovElem mul(const NovElem& u, const NovElem& v) const;

  // unique lowest term with invertible coefficient, strictly below the floor
  bool is_unit(const NovElem& u) const;
  // u^{-1} modulo valuation >= T (less if u itself is only known to a lower floor)
  NovElem invert_if_unit(const NovElem& u, const Q& T) const;

  bool known_zero(const NovElem& u) const { return u.t.empty(); }
  // equal below min(floor(u), floor(v), T)
  bool agree_below(const NovElem& u, const NovElem& v, const Q& T) const;
  std::string format(const NovElem& u) const;
  json to_json(const NovElem& u) const;

 private:
  void clip(NovElem& u) const;
  GroupPtr G_;
  Ring K_;
  Character chi_;
};

struct NovikovOptions {
  Q T = 8;
  int window = 2;  // radius of the not-in-image search around the witness support
};

struct TorResult {
  enum class Status { Vanishes, Obstruction, Unknown };
  Status status = Status::Unknown;
  int k = 0;
  Q T;
  std::string reason;
  // obstruction data (at T): z = Σ witness[i] x_i in X_k
  std::vector<NovElem> witness;
  Val boundary_floor;                // ∂z ≡ 0 below this floor
  bool image_exact = false;          // true: nothing of dimension k+1 can hit z after reduction
  int image_window = -1;             // otherwise the radius of the exact not-in-image search
  std::vector<std::string> transcript;
  json to_json(const NovikovRing& R, const ChainComplex& F) const;
};

const char* status_name(TorResult::Status s);

// Tor_k(K̂G^e, A) via the truncated Novikov complex, run at T and at 2T
TorResult tor_vanishing_test(const ControlledModel& cm, const Dir& e, int k, const NovikovOptions& opt = {});
std::vector<TorResult> tor_profile(const ControlledModel& cm, const Dir& e, int n, const NovikovOptions& opt = {});

// re-check an obstruction: ∂z ≡ 0 below T and the transcript's not-in-image claim
bool verify_obstruction(const ControlledModel& cm, const Dir& e, const TorResult& r, std::string* why = nullptr);

struct LipschitzReport {
  bool ok = true;
  size_t samples = 0;
  std::vector<std::string> violations;
  json to_json() const;
};
// v(σ y) ≥ v(y) - ν on the window cells, ν² = nu2 (a constant loss)
LipschitzReport lipschitz_check(const ControlledModel& cm, const Dir& e, const FinitaryMap& sigma, const Q& nu2,
                                const Window& w);

struct LesReport {
  bool ok = true;
  std::vector<std::string> lines;
  std::vector<std::vector<TorResult::Status>> flags;  // [module A', A, A''][k]
  json to_json() const;
};
// A' ↣ A ↠ A'': implications of the long exact Tor sequence on the vanishing flags
LesReport les_consistency(const ControlledModel& cm_sub, const ControlledModel& cm_mid, const ControlledModel& cm_quo,
                          const Dir& e, int n, const NovikovOptions& opt = {});

}  // namespace sgm
