#include "doctest.h"
#include "sgm/properties.hpp"

using namespace sgm;

namespace {

void check_all(const std::vector<PropertyReport>& reps) {
  for (auto& r : reps) {
    INFO(r.name << ": " << r.first_failure);
    CHECK(r.ok());
  }
}

}  // namespace

TEST_CASE("property suites pass on small budgets") {
  check_all(valuation_laws(60, 1));
  check_all(shift_laws(20, 2));
  check_all(comparison_laws(6, 3));
  check_all(novikov_laws(40, 4));
}
