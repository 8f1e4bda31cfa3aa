#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

namespace lejapce {

/// N non-negative integers; simultaneously a polynomial multi-degree and an
/// interpolation level tuple.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : entries_(dim, 0) {}
  MultiIndex(std::initializer_list<int> entries);
  explicit MultiIndex(std::vector<int> entries);

  static MultiIndex zero(std::size_t dim) { return MultiIndex(dim); }
  static MultiIndex unit(std::size_t dim, std::size_t n);

  std::size_t dim() const { return entries_.size(); }
  int operator[](std::size_t n) const { return entries_[n]; }
  int& operator[](std::size_t n) { return entries_[n]; }
  const std::vector<int>& entries() const { return entries_; }

  int total_degree() const;
  int max_entry() const;
  bool is_zero() const { return total_degree() == 0; }
  /// Number of non-zero entries.
  std::size_t support_size() const;

  MultiIndex plus_unit(std::size_t n) const;
  MultiIndex minus_unit(std::size_t n) const;

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<int> entries_;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& index) const noexcept;
};

/// Graded lexicographic order: total degree first, then lexicographic.
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

/// Ordered multi-index set with insertion order preserved.
///
/// Sets built through insert() stay downward closed and keep their
/// admissible frontier up to date incrementally. Arbitrary (possibly non
/// downward-closed) sets can be built with from_list() for inspection.
class MultiIndexSet {
 public:
  explicit MultiIndexSet(std::size_t dim = 1);

  /// The set {0}.
  static MultiIndexSet root(std::size_t dim);
  /// Arbitrary collection; duplicates are rejected with ConfigError.
  static MultiIndexSet from_list(std::size_t dim, const std::vector<MultiIndex>& indices);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  const MultiIndex& operator[](std::size_t k) const { return indices_[k]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  bool contains(const MultiIndex& index) const { return position_.count(index) != 0; }
  /// Insertion position of `index`; throws ContractViolation when absent.
  std::size_t position(const MultiIndex& index) const;

  bool is_downward_closed() const;

  /// Indices i not in the set such that set + {i} is downward closed, in
  /// lexicographic order. Throws ContractViolation if the set is not DC.
  std::vector<MultiIndex> admissible() const;

  /// Adds an admissible index (or the root to an empty set), keeping the
  /// set downward closed. Throws ContractViolation otherwise.
  void insert(const MultiIndex& index);

  /// Largest entry per dimension (zeros for an empty set).
  std::vector<int> max_degrees() const;

  /// Copy of the indices sorted in graded lexicographic order.
  std::vector<MultiIndex> graded_lex_order() const;

 private:
  bool backward_neighbours_present(const MultiIndex& index) const;
  void rebuild_frontier();

  std::size_t dim_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> position_;
  std::unordered_set<MultiIndex, MultiIndexHash> frontier_;
  bool downward_closed_ = true;
};

/// Union of a DC set and its admissible frontier (in that order).
MultiIndexSet with_admissible(const MultiIndexSet& set);

/// Total-degree set {p : |p|_1 <= p_max} in graded lexicographic order.
MultiIndexSet td_set(std::size_t dim, int p_max);

/// Grid point y^(i) = (y_1^(i_1), ..., y_N^(i_N)) for per-dimension node
/// lists. Throws ContractViolation when a node list is too short.
Eigen::VectorXd node_for(const MultiIndex& index, const std::vector<std::vector<double>>& nodes);

}  // namespace lejapce
