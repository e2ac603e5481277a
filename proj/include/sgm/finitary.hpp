#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgm/geometry.hpp"

namespace sgm {

// Cells g·x with g in center·ball(R), dims lo..hi of a complex.
struct Window {
  int R = 2;
  Elem center;  // empty = identity
  std::string str(const Group& G) const;
};

std::vector<Elem> window_elems(const Group& G, const Window& w);

// Canonical G-volley: Φ(gx) = gΦ(x).
struct Volley {
  ComplexPtr src, dst;
  int degree = 0;
  std::vector<std::vector<std::vector<Chain>>> table;  // table[k][i] = Φ(x_i), x_i in X_k
  int hi() const { return static_cast<int>(table.size()) - 1; }
  // all selections Σ λ s_y, s_y in Φ(y); capped
  std::vector<Chain> apply(const Chain& c, size_t cap = 4096) const;
  static Volley identity(ComplexPtr F, int hi);
  static Volley singleton(const struct FinitaryMap& f);
};

Volley compose_volleys(const Volley& Psi, const Volley& Phi);

// Equivariant default table plus finitely many per-cell overrides.
struct FinitaryMap {
  ComplexPtr src, dst;
  int degree = 0;
  std::vector<std::vector<Chain>> table;                   // table[k][i], source dim k
  std::map<std::pair<int, Cell>, Chain> overrides;         // (source dim, cell) -> value
  std::optional<Window> valid_on;                          // set when only meaningful on a window

  int hi() const { return static_cast<int>(table.size()) - 1; }
  bool equivariant() const { return overrides.empty(); }
  Chain apply_cell(int k, const Cell& y) const;
  Chain apply(const Chain& c) const;

  static FinitaryMap identity(ComplexPtr F, int hi);
  static FinitaryMap zero(ComplexPtr src, ComplexPtr dst, int degree, int hi);
  // x -> g x on every basis cell (equivariant table; g need not be central)
  static FinitaryMap right_mult(ComplexPtr F, const Elem& g, int hi);

  json to_json() const;
  static FinitaryMap from_json(ComplexPtr src, ComplexPtr dst, const json& j);
};

// ψ∘φ. Equivariant inputs give an equivariant table; otherwise the result is
// materialized on the window as overrides.
FinitaryMap compose(const FinitaryMap& psi, const FinitaryMap& phi, std::optional<Window> w = std::nullopt);
FinitaryMap iterate(const FinitaryMap& phi, int k, std::optional<Window> w = std::nullopt);
FinitaryMap add_maps(const FinitaryMap& a, const FinitaryMap& b, const Scalar& s = 1);  // a + s b
// (gφ)(y) = g φ(g⁻¹ y)
FinitaryMap translate_map(const Elem& g, const FinitaryMap& phi);

// Cells of the window in dims lo..hi (in orbit order).
std::vector<std::pair<int, Cell>> window_cells(const ChainComplex& F, const Window& w, int lo, int hi);

// ‖φ‖² and ‖Φ‖² (max over the table, or over the window when overrides exist)
Q norm2(const ControlledModel& cm, const ControlledModel& cmp, const FinitaryMap& f,
        std::optional<Window> w = std::nullopt, int lo = 0, int hi = -1);
Q norm2(const ControlledModel& cm, const ControlledModel& cmp, const Volley& V, int lo = 0, int hi = -1);

struct ShiftReport {
  std::vector<std::vector<Val>> per_cell;  // for basis cells x (the default table)
  Val gsh;                                 // nullopt = +∞ (the map is zero)
  bool exact = false;
  std::string window;                      // descriptor when windowed
  std::optional<Q> event_radius2;          // toward points: R² for the pair (α, R)
  json to_json() const;
};

// true when β_e(g p) - β_e(p) is independent of p for every generator
bool orbit_constant(const Model& M, const Dir& e);

ShiftReport shift_report(const ControlledModel& cm, const ControlledModel& cmp, const Dir& e, const FinitaryMap& f,
                         const Window& w, int lo = 0, int hi = -1);
// sh_b(y) = D_b(y) - D_b(φ y); best (α, R) on the window with R ≤ R_max
ShiftReport gsh_point(const ControlledModel& cm, const ControlledModel& cmp, const Point& b, const FinitaryMap& f,
                      const Window& w, int lo = 0, int hi = -1);

// √A − √B: exact when both are rational squares, else a 1024-bit approximation
Q sqrt_diff(const Q& A, const Q& B);
std::optional<Q> exact_sqrt(const Q& A);
Q sqrt_upper(const Q& A);  // rational upper bound of √A

// Candidate ordering for lifts and homotopies.
struct Chooser {
  std::optional<Dir> e;                       // prefer cells with high valuation toward e
  const ControlledModel* cm = nullptr;
  bool prefer_identity = true;                // x itself first when the complexes agree
};

struct LiftOptions {
  int max_radius = 4;
  int lo = 0, hi = -1;  // target dims (hi = -1: as high as both complexes allow)
};

// chain map F -> F' lifting id_A, equivariant, verified on X
FinitaryMap lift_finitary(ComplexPtr F, ComplexPtr Fp, const Chooser& ch, const LiftOptions& opt = {});
// σ of degree +1 with φ - ψ = ∂σ + σ∂ on dims 0..hi
FinitaryMap homotopy_between(const FinitaryMap& phi, const FinitaryMap& psi, const Chooser& ch,
                             const LiftOptions& opt = {});
// exact check of φ - ψ = ∂σ + σ∂ (on X for equivariant maps, else on the window)
bool verify_homotopy(const FinitaryMap& phi, const FinitaryMap& psi, const FinitaryMap& sigma,
                     std::optional<Window> w = std::nullopt);
bool is_chain_map(const FinitaryMap& f, std::optional<Window> w = std::nullopt);
bool lifts_identity(const FinitaryMap& f, std::optional<Window> w = std::nullopt);

// Solve ∂' s = rhs for s in F'_{k+1} around rhs's support. nullopt on window exhaustion.
std::optional<Chain> solve_boundary(const ChainComplex& Fp, const Chain& rhs, const Chooser& ch, int max_radius,
                                    std::vector<Elem> extra_centers = {});

struct LimitPush {
  FinitaryMap psi;
  Elem g;
  ShiftReport report;
};
// a translate gφ pushing toward ê by at least δ/2 on the window
LimitPush push_at_limit(const ControlledModel& cm, const FinitaryMap& phi, const Dir& e, const Dir& ehat,
                        const Q& delta, const Window& w, int ball_budget = 4);

}  // namespace sgm
