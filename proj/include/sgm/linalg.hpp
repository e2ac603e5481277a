#pragma once

#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sgm/algebra.hpp"

namespace sgm {

using SparseVec = std::vector<std::pair<int, Scalar>>;  // sorted by index, no zeros

void axpy(const Ring& K, SparseVec& y, const Scalar& a, const SparseVec& x);  // y += a x

// Assigns dense ids to keys in first-seen order.
template <class Key>
struct Indexer {
  std::map<Key, int> id;
  std::vector<Key> keys;
  int get(const Key& k) {
    auto it = id.find(k);
    if (it != id.end()) return it->second;
    id.emplace(k, static_cast<int>(keys.size()));
    keys.push_back(k);
    return static_cast<int>(keys.size()) - 1;
  }
  int find(const Key& k) const {
    auto it = id.find(k);
    return it == id.end() ? -1 : it->second;
  }
  size_t size() const { return keys.size(); }
};

// Incremental column echelon form over a field. Columns are added in preference
// order; a column is kept only if independent of the earlier ones, so the
// solution of express() uses the earliest possible columns.
class SpanSolver {
 public:
  explicit SpanSolver(Ring K);
  // returns true if the column was independent
  bool add(const SparseVec& v);
  std::optional<SparseVec> express(const SparseVec& b) const;
  bool in_span(const SparseVec& b) const;
  size_t ncols() const { return ncols_; }
  size_t rank() const { return basis_.size(); }
  // combinations of columns that vanish
  const std::vector<SparseVec>& kernel() const { return kernel_; }

 private:
  struct Row {
    SparseVec v;
    SparseVec combo;
  };
  void reduce(SparseVec& v, SparseVec* combo) const;
  Ring K_;
  size_t ncols_ = 0;
  std::unordered_map<int, Row> basis_;
  std::vector<SparseVec> kernel_;
};

}  // namespace sgm
