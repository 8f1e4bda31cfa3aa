#pragma once

#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "lejapce/distributions.hpp"
#include "lejapce/models.hpp"
#include "lejapce/multiindex.hpp"

namespace lejapce {

/// Per-dimension Leja node lists for a product distribution; the sparse
/// grid of a multi-index set is {node_for(i) : i in set}.
class LejaGrid {
 public:
  explicit LejaGrid(ProductDistribution pdist);

  const ProductDistribution& distribution() const { return pdist_; }
  std::size_t dim() const { return pdist_.dim(); }
  const std::vector<std::vector<double>>& nodes() const { return nodes_; }

  /// Makes at least max_levels[n] + 1 nodes available in dimension n.
  void ensure(const std::vector<int>& max_levels);
  /// Ensures and returns y^(i).
  Eigen::VectorXd point(const MultiIndex& index);

 private:
  ProductDistribution pdist_;
  std::vector<std::vector<double>> nodes_;
};

/// Model values keyed by multi-index (exact keys, no floating-point
/// comparisons). One cache serves one (model, input distribution) pair;
/// reruns of an adaptive algorithm reuse it without new model calls.
class EvaluationCache {
 public:
  explicit EvaluationCache(const Model& model) : model_(&model) {}

  const Model& model() const { return *model_; }

  /// Values at the grid points of `indices`, in order. Missing entries are
  /// evaluated in one batch, in the given order. Extends `grid` to cover
  /// every index either way.
  Eigen::VectorXd values(const std::vector<MultiIndex>& indices, LejaGrid& grid);

  bool contains(const MultiIndex& index) const { return values_.count(index) != 0; }
  std::size_t size() const { return values_.size(); }
  /// Number of points the model has actually been asked for.
  std::size_t model_calls() const { return model_calls_; }

 private:
  const Model* model_;
  std::unordered_map<MultiIndex, double, MultiIndexHash> values_;
  std::size_t model_calls_ = 0;
};

/// Options shared by both adaptive algorithms.
struct AdaptOptions {
  /// Stop once the summed indicator magnitude over the frontier is <= this.
  double tolerance = 0.0;
  /// Stop once #set + #frontier >= budget.
  std::size_t budget = 100;
};

}  // namespace lejapce
