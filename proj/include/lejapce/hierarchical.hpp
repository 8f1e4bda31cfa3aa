#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lejapce/distributions.hpp"
#include "lejapce/errors.hpp"
#include "lejapce/grid.hpp"
#include "lejapce/models.hpp"
#include "lejapce/multiindex.hpp"

namespace lejapce {

/// Modified Newton polynomial of the given degree on a node sequence:
///   nu^i(y) = prod_{k<i} (y - y_k) / (y_i - y_k),  nu^0 = 1.
/// It is 1 at y_i and vanishes at every earlier node.
template <typename Scalar>
Scalar newton_eval(std::span<const double> nodes, int degree, Scalar y) {
  if (degree < 0 || static_cast<std::size_t>(degree) >= nodes.size())
    throw ContractViolation("Newton polynomial of degree " + std::to_string(degree) + " needs " +
                            std::to_string(degree + 1) + " nodes");
  Scalar value(1);
  const double yi = nodes[static_cast<std::size_t>(degree)];
  for (int k = 0; k < degree; ++k) {
    const double yk = nodes[static_cast<std::size_t>(k)];
    value *= (y - Scalar(yk)) / Scalar(yi - yk);
  }
  return value;
}

/// Sparse hierarchical interpolant I[g](y) = sum_i s_i N_i(y) with
/// N_i(y) = prod_n nu^{i_n}(y_n) over a Leja grid.
struct HierSurrogate {
  ProductDistribution pdist;
  /// Growth order: the adaptive set first, then its final frontier.
  MultiIndexSet set;
  Eigen::VectorXd surpluses;
  /// Leja nodes per dimension (at least max level + 1 each).
  std::vector<std::vector<double>> nodes;
  /// Model values at the grid points, aligned with `set`.
  Eigen::VectorXd values;
  /// Indices promoted by the adaptive loop, in order.
  std::vector<MultiIndex> growth_order;
};

/// Evaluates a hierarchical surrogate. Throws DomainError on a dimension
/// mismatch.
double eval_hier(const HierSurrogate& s, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Same, for every row of `points`.
Eigen::VectorXd eval_hier_batch(const HierSurrogate& s, const Eigen::MatrixXd& points);

/// Surplus of an admissible index: g(y^(i)) minus the current interpolant
/// at y^(i). Appends nothing to `s`.
double surplus(const Model& model, const HierSurrogate& s, const MultiIndex& index);

/// Hierarchical surrogate on a given downward-closed set, with surpluses
/// computed in the set's insertion order.
HierSurrogate build_hier(const Model& model, const ProductDistribution& pdist, const MultiIndexSet& set,
                         EvaluationCache* cache = nullptr);

/// Dimension-adaptive hierarchical Leja interpolation.
///
/// Each step computes the surpluses of the admissible frontier (memoized,
/// since adding an index never changes existing surpluses), stops when
/// #set + #frontier >= budget or sum |s| over the frontier <= tolerance, and
/// otherwise promotes the frontier index with the largest |s| (ties within
/// 1e-14 relative go to the lexicographically smallest index). The result
/// covers the set and its final frontier, so every model evaluation is used.
HierSurrogate adapt_hier(const Model& model, const ProductDistribution& pdist, const MultiIndexSet& init,
                         const AdaptOptions& options, EvaluationCache* cache = nullptr);

}  // namespace lejapce
