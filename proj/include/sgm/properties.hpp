#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgm/sigma.hpp"

namespace sgm {

// Randomized law checks shared by `sigma selftest`, the acceptance runner and the Python module.
struct PropertyReport {
  std::string name;
  size_t cases = 0;
  size_t failures = 0;
  std::string first_failure;
  bool ok() const { return failures == 0 && cases > 0; }
  void fail(const std::string& s) {
    if (failures++ == 0) first_failure = s;
  }
};

// v(-c) = v(c), v(c+d) ≥ min, v_{gγ}(gc) = v_γ(c) + shift, |v(c)-v(d)| ≤ d_H; per model family
std::vector<PropertyReport> valuation_laws(size_t per_family, uint64_t seed);
// sh ≥ -‖φ‖, translation invariance, superadditivity, gsh(φᵏ) ≥ k gsh(φ), and the same toward points
std::vector<PropertyReport> shift_laws(size_t count, uint64_t seed);
// random chain maps lifting id on the Z^2 and F2 resolutions, homotopies checked exactly
std::vector<PropertyReport> comparison_laws(size_t pairs, uint64_t seed);
// truncation coherence and two-sided inverses in the Novikov ring
std::vector<PropertyReport> novikov_laws(size_t count, uint64_t seed);

}  // namespace sgm
