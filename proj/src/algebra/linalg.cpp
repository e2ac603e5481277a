#include "sgm/linalg.hpp"

namespace sgm {

void axpy(const Ring& K, SparseVec& y, const Scalar& a, const SparseVec& x) {
  if (a == 0 || x.empty()) return;
  SparseVec out;
  out.reserve(y.size() + x.size());
  size_t i = 0, j = 0;
  while (i < y.size() || j < x.size()) {
    if (j == x.size() || (i < y.size() && y[i].first < x[j].first)) {
      out.push_back(std::move(y[i++]));
    } else if (i == y.size() || x[j].first < y[i].first) {
      Scalar v = K.norm(a * x[j].second);
      if (v != 0) out.emplace_back(x[j].first, v);
      ++j;
    } else {
      Scalar v = K.norm(y[i].second + a * x[j].second);
      if (v != 0) out.emplace_back(y[i].first, v);
      ++i;
      ++j;
    }
  }
  y.swap(out);
}

SpanSolver::SpanSolver(Ring K) : K_(K) {
  // over Z we eliminate over Q; callers check integrality
  if (K_.kind == Ring::Kind::Z) K_ = Ring::rationals();
}

void SpanSolver::reduce(SparseVec& v, SparseVec* combo) const {
  size_t pos = 0;
  while (pos < v.size()) {
    auto it = basis_.find(v[pos].first);
    if (it == basis_.end()) {
      ++pos;
      continue;
    }
    const Row& r = it->second;
    Scalar f = K_.norm(-v[pos].second * K_.inv(r.v.front().second));
    axpy(K_, v, f, r.v);
    if (combo) axpy(K_, *combo, f, r.combo);
    // entries before pos are untouched since r's leading index equals v[pos]
  }
}

bool SpanSolver::add(const SparseVec& v0) {
  SparseVec v = v0;
  SparseVec combo{{static_cast<int>(ncols_), Scalar(1)}};
  ++ncols_;
  reduce(v, &combo);
  if (v.empty()) {
    kernel_.push_back(std::move(combo));
    return false;
  }
  int lead = v.front().first;
  basis_.emplace(lead, Row{std::move(v), std::move(combo)});
  return true;
}

std::optional<SparseVec> SpanSolver::express(const SparseVec& b) const {
  SparseVec v = b, combo;
  reduce(v, &combo);
  if (!v.empty()) return std::nullopt;
  for (auto& e : combo) e.second = -e.second;
  return combo;
}

bool SpanSolver::in_span(const SparseVec& b) const {
  SparseVec v = b;
  reduce(v, nullptr);
  return v.empty();
}

}  // namespace sgm
