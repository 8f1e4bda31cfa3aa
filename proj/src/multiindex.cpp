#include "lejapce/multiindex.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lejapce/errors.hpp"

namespace lejapce {

namespace {

std::string describe(const MultiIndex& index) {
  std::string out = "(";
  for (std::size_t n = 0; n < index.dim(); ++n) {
    if (n) out += ',';
    out += std::to_string(index[n]);
  }
  return out + ')';
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_)
    if (e < 0) throw ConfigError("multi-index entries must be non-negative");
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t n) {
  MultiIndex index(dim);
  index.entries_.at(n) = 1;
  return index;
}

int MultiIndex::total_degree() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

int MultiIndex::max_entry() const {
  return entries_.empty() ? 0 : *std::max_element(entries_.begin(), entries_.end());
}

std::size_t MultiIndex::support_size() const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](int e) { return e != 0; }));
}

MultiIndex MultiIndex::plus_unit(std::size_t n) const {
  MultiIndex out = *this;
  ++out.entries_.at(n);
  return out;
}

MultiIndex MultiIndex::minus_unit(std::size_t n) const {
  if (entries_.at(n) == 0) throw ContractViolation("cannot step below zero in a multi-index");
  MultiIndex out = *this;
  --out.entries_[n];
  return out;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& index) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (int e : index.entries()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = a.total_degree();
  const int db = b.total_degree();
  if (da != db) return da < db;
  return a < b;
}

MultiIndexSet::MultiIndexSet(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ConfigError("multi-index sets need at least one dimension");
}

MultiIndexSet MultiIndexSet::root(std::size_t dim) {
  MultiIndexSet set(dim);
  set.insert(MultiIndex::zero(dim));
  return set;
}

MultiIndexSet MultiIndexSet::from_list(std::size_t dim, const std::vector<MultiIndex>& indices) {
  MultiIndexSet set(dim);
  for (const auto& index : indices) {
    if (index.dim() != dim) throw ConfigError("multi-index " + describe(index) + " has the wrong dimension");
    if (!set.position_.emplace(index, set.indices_.size()).second)
      throw ConfigError("duplicate multi-index " + describe(index));
    set.indices_.push_back(index);
  }
  set.downward_closed_ = true;
  for (const auto& index : set.indices_)
    if (!set.backward_neighbours_present(index)) {
      set.downward_closed_ = false;
      break;
    }
  if (set.downward_closed_) set.rebuild_frontier();
  return set;
}

std::size_t MultiIndexSet::position(const MultiIndex& index) const {
  auto it = position_.find(index);
  if (it == position_.end()) throw ContractViolation("multi-index " + describe(index) + " is not in the set");
  return it->second;
}

bool MultiIndexSet::backward_neighbours_present(const MultiIndex& index) const {
  for (std::size_t n = 0; n < dim_; ++n)
    if (index[n] > 0 && !contains(index.minus_unit(n))) return false;
  return true;
}

bool MultiIndexSet::is_downward_closed() const { return downward_closed_; }

void MultiIndexSet::rebuild_frontier() {
  frontier_.clear();
  if (indices_.empty()) return;
  for (const auto& index : indices_)
    for (std::size_t n = 0; n < dim_; ++n) {
      MultiIndex next = index.plus_unit(n);
      if (!contains(next) && backward_neighbours_present(next)) frontier_.insert(std::move(next));
    }
}

std::vector<MultiIndex> MultiIndexSet::admissible() const {
  if (!downward_closed_) throw ContractViolation("admissible set requested for a set that is not downward closed");
  if (indices_.empty()) return {MultiIndex::zero(dim_)};
  std::vector<MultiIndex> out(frontier_.begin(), frontier_.end());
  std::sort(out.begin(), out.end());
  return out;
}

void MultiIndexSet::insert(const MultiIndex& index) {
  if (index.dim() != dim_) throw ContractViolation("multi-index " + describe(index) + " has the wrong dimension");
  if (!downward_closed_) throw ContractViolation("insert into a set that is not downward closed");
  if (indices_.empty()) {
    if (!index.is_zero()) throw ContractViolation("the first index of a downward-closed set must be zero");
  } else if (frontier_.erase(index) == 0) {
    throw ContractViolation("multi-index " + describe(index) + " is not admissible");
  }
  position_.emplace(index, indices_.size());
  indices_.push_back(index);
  for (std::size_t n = 0; n < dim_; ++n) {
    MultiIndex next = index.plus_unit(n);
    if (backward_neighbours_present(next)) frontier_.insert(std::move(next));
  }
}

std::vector<int> MultiIndexSet::max_degrees() const {
  std::vector<int> out(dim_, 0);
  for (const auto& index : indices_)
    for (std::size_t n = 0; n < dim_; ++n) out[n] = std::max(out[n], index[n]);
  return out;
}

std::vector<MultiIndex> MultiIndexSet::graded_lex_order() const {
  std::vector<MultiIndex> out = indices_;
  std::sort(out.begin(), out.end(), graded_lex_less);
  return out;
}

MultiIndexSet with_admissible(const MultiIndexSet& set) {
  MultiIndexSet out = set;
  for (const auto& index : set.admissible()) out.insert(index);
  return out;
}

MultiIndexSet td_set(std::size_t dim, int p_max) {
  if (p_max < 0) throw ConfigError("total degree must be non-negative");
  std::vector<MultiIndex> all;
  MultiIndex cur(dim);
  // Enumerate the box [0, p_max]^dim restricted to |p| <= p_max.
  const auto recurse = [&](auto&& self, std::size_t n, int budget) -> void {
    if (n == dim) {
      all.push_back(cur);
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      cur[n] = e;
      self(self, n + 1, budget - e);
    }
    cur[n] = 0;
  };
  recurse(recurse, 0, p_max);
  std::sort(all.begin(), all.end(), graded_lex_less);
  MultiIndexSet set(dim);
  for (const auto& index : all) set.insert(index);
  return set;
}

Eigen::VectorXd node_for(const MultiIndex& index, const std::vector<std::vector<double>>& nodes) {
  if (nodes.size() != index.dim()) throw ContractViolation("node lists do not match the multi-index dimension");
  Eigen::VectorXd y(static_cast<Eigen::Index>(index.dim()));
  for (std::size_t n = 0; n < index.dim(); ++n) {
    const auto level = static_cast<std::size_t>(index[n]);
    if (level >= nodes[n].size())
      throw ContractViolation("Leja sequence of dimension " + std::to_string(n) + " is too short for level " +
                              std::to_string(level));
    y[static_cast<Eigen::Index>(n)] = nodes[n][level];
  }
  return y;
}

}  // namespace lejapce
