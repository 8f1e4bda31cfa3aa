#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lejapce/distributions.hpp"
#include "lejapce/grid.hpp"
#include "lejapce/hierarchical.hpp"
#include "lejapce/models.hpp"
#include "lejapce/multiindex.hpp"
#include "lejapce/orthopoly.hpp"

namespace lejapce {

struct PceDiagnostics {
  /// ||A c - g||_inf of the last interpolation solve.
  double residual_inf = 0.0;
  /// Set when residual_inf > 1e-6 ||g||_inf.
  bool residual_warning = false;
  /// Indices promoted by the adaptive loop, in order (empty for fixed sets).
  std::vector<MultiIndex> growth_order;
};

/// Interpolating PCE sum_p c_p Psi_p(y) with one term per grid node.
struct PceSurrogate {
  ProductDistribution pdist;
  MultiIndexSet set;
  Eigen::VectorXd coefficients;
  /// Orthonormal recurrences per dimension, truncated to the set's max degree.
  std::vector<RecurrenceTable> recurrences;
  /// Leja nodes per dimension.
  std::vector<std::vector<double>> nodes;
  /// Model values at the grid points, aligned with `set`.
  Eigen::VectorXd values;
  PceDiagnostics diagnostics;
};

/// Recurrences of every marginal up to the given per-dimension degrees.
std::vector<RecurrenceTable> recurrences_for(const ProductDistribution& pdist, const std::vector<int>& degrees);

/// Psi_p(y) = prod_n psi_n^{p_n}(y_n). Throws DomainError if some degree
/// exceeds its table.
double eval_basis(const std::vector<RecurrenceTable>& recs, const MultiIndex& index,
                  const Eigen::Ref<const Eigen::VectorXd>& y);

/// a_{mk} = Psi_{indices[k]}(y^(indices[m])).
Eigen::MatrixXd collocation_matrix(const std::vector<MultiIndex>& indices,
                                   const std::vector<std::vector<double>>& nodes,
                                   const std::vector<RecurrenceTable>& recs);

struct SolveResult {
  Eigen::VectorXd coefficients;
  double residual_inf = 0.0;
  bool residual_warning = false;
};

/// Solves A c = g by LU with partial pivoting plus one refinement step.
/// Throws NumericalError naming the pivot when A is singular to working
/// precision.
SolveResult solve_collocation(const Eigen::MatrixXd& a, const Eigen::VectorXd& g);

/// Assembles and solves the interpolation system of `indices` on the Leja
/// grid given by `nodes`.
SolveResult assemble_and_solve(const std::vector<MultiIndex>& indices, const std::vector<std::vector<double>>& nodes,
                               const std::vector<RecurrenceTable>& recs, const Eigen::VectorXd& values);

/// PCE on the same set and grid as `h`, from its cached model values.
PceSurrogate transform_to_pce(const HierSurrogate& h);

/// Interpolating PCE on a fixed downward-closed set (e.g. a TD set).
PceSurrogate build_pce(const Model& model, const ProductDistribution& pdist, const MultiIndexSet& set,
                       EvaluationCache* cache = nullptr);

/// Dimension-adaptive interpolating PCE.
///
/// Every iteration solves the interpolation system on the set plus its
/// admissible frontier, stops when #set + #frontier >= budget or the summed
/// |c| over the frontier is <= tolerance, and otherwise promotes the frontier
/// index with the largest |c| (ties as in adapt_hier). The returned
/// coefficients come from a fresh solve on the final set plus frontier.
PceSurrogate adapt_pce(const Model& model, const ProductDistribution& pdist, const MultiIndexSet& init,
                       const AdaptOptions& options, EvaluationCache* cache = nullptr);

double eval_pce(const PceSurrogate& p, const Eigen::Ref<const Eigen::VectorXd>& y);
Eigen::VectorXd eval_pce_batch(const PceSurrogate& p, const Eigen::MatrixXd& points);

}  // namespace lejapce
