#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgm/novikov.hpp"

namespace sgm {

struct Budgets {
  int window = 4;        // largest group-ball radius for push searches (radii 1, 2, 4, ...)
  Q nu = 1;              // required push
  Q T = 8;               // Novikov truncation
  int novikov_window = 2;
  int lag_window = 2;    // cycle window radius for CA checks
  int lag_margin = 2;    // preimages may use cells this much further out
  std::vector<Q> levels{0, 1, 2, 3};
  int orbit_depth = 2;   // orbit-closure sampling for non-translation models
  int homotopy_radius = 4;
  bool crosscheck = true;  // also run the Novikov test when a push is found
};

struct PushCertificate {
  Dir e;
  int n = 0;
  FinitaryMap phi;
  Q nu;
  ShiftReport report;
  std::optional<FinitaryMap> sigma;  // id - φ = ∂σ + σ∂
  Q sigma_norm2;
  int radius = 0;  // search radius at which φ was found
};

// Searches equivariant chain maps on dims 0..n lifting id_A with v(φ x) ≥ v(x) + ν on basis cells.
std::optional<PushCertificate> find_push(const ControlledModel& cm, const Dir& e, int n, const Budgets& b,
                                         std::string* why = nullptr);
bool verify_push(const ControlledModel& cm, const PushCertificate& c, std::string* why = nullptr);

struct BoundingCertificate {
  int i = 0;  // cycle dimension; -1 = an element of A
  Q level;
  Chain z, c;
  AVec a;     // i = -1
  Val vz, vc;
  Q lag;
  std::string source;  // "window" or "certificate"
};

struct LevelLag {
  int i = 0;
  Q s;
  size_t cycles = 0;
  bool bounded = true;
  Q lag;  // worst lag over the cycles at this level
};

struct LagEstimate {
  std::vector<LevelLag> levels;
  std::vector<BoundingCertificate> certs;
  bool constant = false;
  std::optional<Q> lambda2;  // squared constant lag when known
  Q max_lag() const;
  bool all_bounded() const;
};

// CA^{n-1} over e on windows: cycles over the horoball at each level, best bounding chains
LagEstimate ca_check(const ControlledModel& cm, const Dir& e, int n, const std::vector<Q>& levels, const Window& w,
                     int margin = 2, const PushCertificate* cert = nullptr);
// λ = ‖σ‖ (in valuation units), validated against ca_check; throws if an observed lag exceeds it
LagEstimate lag_from_push(const ControlledModel& cm, const PushCertificate& cert, const Budgets& b);

struct PointLag {
  int i = 0;
  Q radius2;     // cycles with D_b(z)² ≤ radius2
  size_t cycles = 0;
  bool bounded = true;
  Q lag;         // max D_b(c) - D_b(z) (1024-bit rounding when not a difference of rationals)
};
std::vector<PointLag> ca_over_point(const ControlledModel& cm, const Point& b, int n, const Window& w, int margin = 2);

// least radius² so that each sampled a has a 0-chain c with ε(c) = a inside B_r(b)
std::optional<Q> bounded_support_check(const ControlledModel& cm, const Point& b, const std::vector<AVec>& samples,
                                       int radius_budget);

struct Verdict {
  enum class Kind { Member, NonMember, Unknown };
  Kind kind = Kind::Unknown;
  Dir e;
  int n = 0;
  std::optional<PushCertificate> push;
  std::optional<TorResult> obstruction;
  std::optional<Dir> obstruction_at;
  std::vector<std::string> tried;
  std::string note;
};
const char* verdict_name(Verdict::Kind k);

Verdict membership(const ControlledModel& cm, const Dir& e, int n, const Budgets& b);

struct ZeroLag {
  ComplexPtr F;
  ControlledModel cm;
  Volley homotopy;  // dim 0: ξ-cells, v(σ c) ≥ v(c)
  std::vector<PushCertificate> pushes;
  size_t expansions = 0;
};
// Σ^{n-1} must be full on the sample (checked here through membership)
ZeroLag zero_lag_transform(const ControlledModel& cm, const std::vector<Dir>& dirs, int n, const Budgets& b);

struct ProductRow {
  Dir join;
  bool predicted_member = false;
  Verdict::Kind verdict = Verdict::Kind::Unknown;
  std::string factors;  // factor verdict summary
  bool ok = true;
};
struct ProductReport {
  std::vector<ProductRow> rows;
  std::vector<Verdict> verdicts;  // product verdicts, same order
  size_t mismatches = 0, undetermined = 0;
};
ProductReport product_complement_check(const ControlledModel& cmA, const ControlledModel& cmB, const ControlledModel& cmP,
                                       int n, const std::vector<Dir>& joins, const Budgets& b, int jobs = 1);

struct TitsReport {
  std::vector<std::vector<Q>> forms;  // gsh(u) = min ⟨ℓ, u⟩ over these
  Q margin2;                          // squared angular margin at e (0: not positive at e)
  std::vector<std::pair<Dir, Q>> samples;
  std::vector<Dir> failing;
  bool ok = false;
};
TitsReport tits_openness_probe(const ControlledModel& cm, const PushCertificate& cert, const Q& radius, int samples);

struct InvarianceRow {
  Dir e;
  Verdict::Kind v1 = Verdict::Kind::Unknown, v2 = Verdict::Kind::Unknown;
  bool transported = false;  // αφᵏβ verified on the second complex
  int k = 0;
  Q bound, gsh;
};
struct InvarianceReport {
  std::vector<InvarianceRow> rows;
  bool agree = true, transports_ok = true;
};
InvarianceReport invariance_crosscheck(const ControlledModel& cm1, const ControlledModel& cm2, const std::vector<Dir>& dirs,
                                       int n, const Budgets& b, int jobs = 1);

// versioned JSON documents
inline constexpr const char* kCertSchema = "sigma.certificate";
json push_to_json(const ControlledModel& cm, const PushCertificate& c);
json obstruction_to_json(const ControlledModel& cm, const Dir& e, int n, const TorResult& r);
json lag_to_json(const ControlledModel& cm, const Dir& e, int n, const LagEstimate& est);
json verdict_to_json(const Verdict& v);
// re-checks a certificate document from its contents alone
bool verify_certificate(const json& j, std::string* why = nullptr);

// runs independent tasks on a fixed pool, results in input order
template <class T, class F>
std::vector<T> parallel_map(size_t count, int jobs, F f);

}  // namespace sgm

#include "sgm/detail/parallel.hpp"
