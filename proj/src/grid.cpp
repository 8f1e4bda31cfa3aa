#include "lejapce/grid.hpp"

#include <algorithm>
#include <unordered_set>

#include "lejapce/errors.hpp"
#include "lejapce/leja.hpp"

namespace lejapce {

LejaGrid::LejaGrid(ProductDistribution pdist) : pdist_(std::move(pdist)), nodes_(pdist_.dim()) {
  for (std::size_t n = 0; n < pdist_.dim(); ++n) nodes_[n] = cached_leja_nodes(pdist_[n], 1);
}

void LejaGrid::ensure(const std::vector<int>& max_levels) {
  if (max_levels.size() != dim()) throw ContractViolation("level vector does not match the grid dimension");
  for (std::size_t n = 0; n < dim(); ++n) {
    const auto needed = static_cast<std::size_t>(max_levels[n]) + 1;
    if (nodes_[n].size() < needed) nodes_[n] = cached_leja_nodes(pdist_[n], needed);
  }
}

Eigen::VectorXd LejaGrid::point(const MultiIndex& index) {
  ensure(index.entries());
  return node_for(index, nodes_);
}

Eigen::VectorXd EvaluationCache::values(const std::vector<MultiIndex>& indices, LejaGrid& grid) {
  // Callers read grid.nodes() afterwards, cached or not.
  std::vector<int> levels(grid.dim(), 0);
  for (const auto& index : indices)
    for (std::size_t n = 0; n < levels.size(); ++n) levels[n] = std::max(levels[n], index[n]);
  grid.ensure(levels);
  std::vector<const MultiIndex*> missing;
  std::unordered_set<MultiIndex, MultiIndexHash> queued;
  for (const auto& index : indices)
    if (!contains(index) && queued.insert(index).second) missing.push_back(&index);
  if (!missing.empty()) {
    Eigen::MatrixXd points(static_cast<Eigen::Index>(missing.size()), static_cast<Eigen::Index>(grid.dim()));
    for (std::size_t k = 0; k < missing.size(); ++k)
      points.row(static_cast<Eigen::Index>(k)) = grid.point(*missing[k]).transpose();
    const Eigen::VectorXd fresh = model_->evaluate_batch(points);
    model_calls_ += missing.size();
    for (std::size_t k = 0; k < missing.size(); ++k) values_[*missing[k]] = fresh[static_cast<Eigen::Index>(k)];
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) out[static_cast<Eigen::Index>(k)] = values_.at(indices[k]);
  return out;
}

}  // namespace lejapce
