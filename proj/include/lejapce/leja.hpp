#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lejapce/distributions.hpp"

namespace lejapce {

/// Number of equispaced candidates used for the global search of each node.
inline constexpr std::size_t kLejaGridPoints = 100001;

/// Starting node of every sequence: the median of the law.
double initial_node(const Distribution& dist);

/// Nested weighted Leja nodes of one distribution.
///
/// Node j maximizes sqrt(pdf(y)) * prod_{k<j} |y - y_k| over the effective
/// support. The search runs in log space on a dense candidate grid and then
/// polishes the best cells by golden-section search. Among maximizers whose
/// log objectives agree to 1e-12 the smallest node wins.
class LejaSequence {
 public:
  explicit LejaSequence(Distribution dist);

  const Distribution& distribution() const { return dist_; }
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t j) const { return nodes_[j]; }

  /// Appends nodes until size() == new_length. Existing nodes never change.
  /// Throws ContractViolation if new_length < size().
  void extend(std::size_t new_length);

  /// 0.5 * log pdf(y) + sum_k log |y - y_k| over the first `prefix` nodes.
  double log_objective(double y, std::size_t prefix) const;

 private:
  double unscale(double z) const;
  double scaled_objective(double z) const;
  void ensure_grid();
  void append_next();

  Distribution dist_;
  double lo_;
  double hi_;
  double center_;
  double half_;
  std::vector<double> nodes_;
  std::vector<double> scaled_;
  // Running log objective on the candidate grid, in scaled coordinates.
  std::vector<double> grid_objective_;
  std::size_t grid_terms_ = 0;
};

/// Functional form of LejaSequence::extend.
LejaSequence extend(LejaSequence seq, std::size_t new_length);

/// First `count` Leja nodes of `dist`, served from a process-wide cache so
/// that dimensions sharing a distribution share one sequence.
std::vector<double> cached_leja_nodes(const Distribution& dist, std::size_t count);

}  // namespace lejapce
