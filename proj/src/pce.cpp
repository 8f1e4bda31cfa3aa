#include "lejapce/pce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "lejapce/errors.hpp"

namespace lejapce {

namespace {

int degree_limit(const Distribution& dist) {
  const bool analytic = dist.kind() == Distribution::Kind::Uniform || dist.kind() == Distribution::Kind::Normal;
  return analytic ? kMaxAnalyticDegree : kMaxPolynomialDegree;
}

// T_n(j, p) = psi_n^p(y_n^(j)), grown with doubling capacity so that deep
// refinement in one dimension stays cheap.
class BasisTables {
 public:
  explicit BasisTables(const ProductDistribution& pdist)
      : pdist_(pdist), tables_(pdist.dim()), rows_(pdist.dim(), 0) {}

  void ensure(const std::vector<int>& levels, const std::vector<std::vector<double>>& nodes) {
    Eigen::VectorXd row;
    for (std::size_t n = 0; n < levels.size(); ++n) {
      auto& t = tables_[n];
      if (t.cols() <= levels[n]) {
        const int degree = std::max(levels[n], std::min(2 * static_cast<int>(t.cols()) + 7, degree_limit(pdist_[n])));
        recs_.resize(tables_.size());
        recs_[n] = cached_recurrence(pdist_[n], degree);
        t.resize(degree + 1, degree + 1);
        rows_[n] = 0;
      }
      for (; rows_[n] <= levels[n]; ++rows_[n]) {
        eval_orthonormal_all(recs_[n], recs_[n].max_degree, nodes[n][static_cast<std::size_t>(rows_[n])], row);
        t.row(rows_[n]) = row.transpose();
      }
    }
  }

  double entry(const MultiIndex& row, const MultiIndex& col) const {
    double value = 1.0;
    for (std::size_t n = 0; n < tables_.size(); ++n) value *= tables_[n](row[n], col[n]);
    return value;
  }

 private:
  const ProductDistribution& pdist_;
  std::vector<Eigen::MatrixXd> tables_;
  std::vector<RecurrenceTable> recs_;
  std::vector<int> rows_;
};

std::vector<int> max_levels(const std::vector<MultiIndex>& indices, std::size_t dim) {
  std::vector<int> levels(dim, 0);
  for (const auto& index : indices)
    for (std::size_t n = 0; n < dim; ++n) levels[n] = std::max(levels[n], index[n]);
  return levels;
}

// Same convention as LAPACK getrf: only an exactly zero (or non-finite)
// pivot makes the matrix singular. Ill-conditioning short of that shows up
// in the residual instead.
void check_pivots(const Eigen::Ref<const Eigen::MatrixXd>& lu) {
  for (Eigen::Index i = 0; i < lu.rows(); ++i) {
    const double pivot = lu(i, i);
    if (!std::isfinite(pivot) || pivot == 0.0) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "interpolation matrix is singular to working precision: pivot %ld is %.3e",
                    static_cast<long>(i), pivot);
      throw NumericalError(buf);
    }
  }
}

double residual_inf(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::VectorXd& c, const Eigen::VectorXd& g) {
  return g.size() == 0 ? 0.0 : (g - a * c).lpNorm<Eigen::Infinity>();
}

// Square matrix that grows by bordering, with doubling storage.
class GrowingMatrix {
 public:
  Eigen::Index size() const { return k_; }
  auto view() { return store_.topLeftCorner(k_, k_); }
  auto view() const { return store_.topLeftCorner(k_, k_); }
  void grow(Eigen::Index k) {
    if (k > store_.rows()) {
      Eigen::MatrixXd bigger(std::max(k, 2 * store_.rows()), std::max(k, 2 * store_.rows()));
      bigger.topLeftCorner(k_, k_) = view();
      store_.swap(bigger);
    }
    k_ = k;
  }

 private:
  Eigen::MatrixXd store_;
  Eigen::Index k_ = 0;
};

// LU factors P A = L U of a matrix that only ever grows by bordering.
// New rows never pivot into old columns, so the caller watches the residual
// and refactors from scratch when it degrades.
class BorderedLu {
 public:
  Eigen::Index size() const { return lu_.size(); }

  void reset(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    check_pivots(lu.matrixLU());
    lu_.grow(0);
    lu_.grow(a.rows());
    lu_.view() = lu.matrixLU();
    perm_.assign(static_cast<std::size_t>(a.rows()), 0);
    const auto& indices = lu.permutationP().indices();
    for (Eigen::Index i = 0; i < a.rows(); ++i) perm_[static_cast<std::size_t>(indices[i])] = i;
  }

  // `a` holds the old matrix as its leading block.
  void extend(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    const Eigen::Index k = size();
    const Eigen::Index m = a.rows() - k;
    if (m == 0) return;
    if (k == 0) return reset(a);
    Eigen::MatrixXd pb(k, m);
    for (Eigen::Index r = 0; r < k; ++r) pb.row(r) = a.block(perm_[static_cast<std::size_t>(r)], k, 1, m);
    const auto old = lu_.view();
    const Eigen::MatrixXd u12 = old.triangularView<Eigen::UnitLower>().solve(pb);
    const Eigen::MatrixXd l21 = old.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(a.bottomLeftCorner(m, k));
    const Eigen::MatrixXd schur = a.bottomRightCorner(m, m) - l21 * u12;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu22(schur);

    lu_.grow(k + m);
    auto lu = lu_.view();
    lu.topRightCorner(k, m) = u12;
    const auto& indices = lu22.permutationP().indices();
    perm_.resize(static_cast<std::size_t>(k + m));
    for (Eigen::Index i = 0; i < m; ++i) {
      lu.block(k + indices[i], 0, 1, k) = l21.row(i);
      perm_[static_cast<std::size_t>(k + indices[i])] = k + i;
    }
    lu.bottomRightCorner(m, m) = lu22.matrixLU();
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& g) const {
    Eigen::VectorXd x(g.size());
    for (Eigen::Index r = 0; r < g.size(); ++r) x[r] = g[perm_[static_cast<std::size_t>(r)]];
    const auto lu = lu_.view();
    lu.triangularView<Eigen::UnitLower>().solveInPlace(x);
    lu.triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
  }

 private:
  GrowingMatrix lu_;
  std::vector<Eigen::Index> perm_;
};

void check_init(const ProductDistribution& pdist, const MultiIndexSet& init) {
  if (init.dim() != pdist.dim()) throw ConfigError("initial multi-index set has the wrong dimension");
  if (init.empty() || !init.is_downward_closed())
    throw ConfigError("initial multi-index set must be non-empty and downward closed");
}

PceSurrogate finish(const ProductDistribution& pdist, const MultiIndexSet& set, const LejaGrid& grid,
                    const Eigen::VectorXd& values) {
  PceSurrogate out;
  out.pdist = pdist;
  out.set = set;
  out.nodes = grid.nodes();
  out.values = values;
  out.recurrences = recurrences_for(pdist, set.max_degrees());
  const SolveResult solved = assemble_and_solve(set.indices(), out.nodes, out.recurrences, values);
  out.coefficients = solved.coefficients;
  out.diagnostics.residual_inf = solved.residual_inf;
  out.diagnostics.residual_warning = solved.residual_warning;
  return out;
}

}  // namespace

std::vector<RecurrenceTable> recurrences_for(const ProductDistribution& pdist, const std::vector<int>& degrees) {
  if (degrees.size() != pdist.dim()) throw ContractViolation("degree vector does not match the dimension");
  std::vector<RecurrenceTable> recs;
  recs.reserve(degrees.size());
  for (std::size_t n = 0; n < degrees.size(); ++n) recs.push_back(cached_recurrence(pdist[n], degrees[n]));
  return recs;
}

double eval_basis(const std::vector<RecurrenceTable>& recs, const MultiIndex& index,
                  const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (index.dim() != recs.size() || static_cast<std::size_t>(y.size()) != recs.size())
    throw DomainError("basis evaluation: dimension mismatch");
  double value = 1.0;
  for (std::size_t n = 0; n < recs.size(); ++n)
    value *= eval_orthonormal(recs[n], index[n], y[static_cast<Eigen::Index>(n)]);
  return value;
}

Eigen::MatrixXd collocation_matrix(const std::vector<MultiIndex>& indices,
                                   const std::vector<std::vector<double>>& nodes,
                                   const std::vector<RecurrenceTable>& recs) {
  const std::size_t dim = recs.size();
  const std::vector<int> levels = max_levels(indices, dim);
  std::vector<Eigen::MatrixXd> tables(dim);
  Eigen::VectorXd row;
  for (std::size_t n = 0; n < dim; ++n) {
    if (nodes[n].size() <= static_cast<std::size_t>(levels[n]))
      throw ContractViolation("collocation matrix: too few Leja nodes in dimension " + std::to_string(n));
    tables[n].resize(levels[n] + 1, levels[n] + 1);
    for (int j = 0; j <= levels[n]; ++j) {
      eval_orthonormal_all(recs[n], levels[n], nodes[n][static_cast<std::size_t>(j)], row);
      tables[n].row(j) = row.transpose();
    }
  }
  const auto k = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < k; ++r) {
      double value = 1.0;
      for (std::size_t n = 0; n < dim; ++n)
        value *= tables[n](indices[static_cast<std::size_t>(r)][n], indices[static_cast<std::size_t>(c)][n]);
      a(r, c) = value;
    }
  return a;
}

SolveResult solve_collocation(const Eigen::MatrixXd& a, const Eigen::VectorXd& g) {
  if (a.rows() != a.cols() || a.rows() != g.size()) throw ContractViolation("interpolation system is not square");
  SolveResult out;
  if (a.rows() == 0) return out;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  check_pivots(lu.matrixLU());
  out.coefficients = lu.solve(g);
  out.coefficients += lu.solve(Eigen::VectorXd(g - a * out.coefficients));
  out.residual_inf = residual_inf(a, out.coefficients, g);
  out.residual_warning = out.residual_inf > 1e-6 * g.lpNorm<Eigen::Infinity>();
  return out;
}

SolveResult assemble_and_solve(const std::vector<MultiIndex>& indices, const std::vector<std::vector<double>>& nodes,
                               const std::vector<RecurrenceTable>& recs, const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != indices.size())
    throw ContractViolation("number of model values does not match the number of multi-indices");
  return solve_collocation(collocation_matrix(indices, nodes, recs), values);
}

PceSurrogate transform_to_pce(const HierSurrogate& h) {
  PceSurrogate out;
  out.pdist = h.pdist;
  out.set = h.set;
  out.nodes = h.nodes;
  out.values = h.values;
  out.recurrences = recurrences_for(h.pdist, h.set.max_degrees());
  const SolveResult solved = assemble_and_solve(h.set.indices(), h.nodes, out.recurrences, h.values);
  out.coefficients = solved.coefficients;
  out.diagnostics.residual_inf = solved.residual_inf;
  out.diagnostics.residual_warning = solved.residual_warning;
  out.diagnostics.growth_order = h.growth_order;
  return out;
}

PceSurrogate build_pce(const Model& model, const ProductDistribution& pdist, const MultiIndexSet& set,
                       EvaluationCache* cache) {
  check_init(pdist, set);
  EvaluationCache local(model);
  EvaluationCache& values_cache = cache ? *cache : local;
  LejaGrid grid(pdist);
  grid.ensure(set.max_degrees());
  const Eigen::VectorXd values = values_cache.values(set.indices(), grid);
  return finish(pdist, set, grid, values);
}

PceSurrogate adapt_pce(const Model& model, const ProductDistribution& pdist, const MultiIndexSet& init,
                       const AdaptOptions& options, EvaluationCache* cache) {
  check_init(pdist, init);
  if (options.budget < init.size() + init.admissible().size())
    throw ConfigError("budget " + std::to_string(options.budget) + " is smaller than the initial set plus its frontier (" +
                      std::to_string(init.size() + init.admissible().size()) + ")");
  if (!(options.tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");

  EvaluationCache local(model);
  EvaluationCache& values_cache = cache ? *cache : local;
  LejaGrid grid(pdist);
  BasisTables tables(pdist);

  // System indices in order of first appearance; the set plus frontier only
  // grows, so the matrix is extended by bordering.
  std::vector<MultiIndex> sys;
  std::unordered_map<MultiIndex, Eigen::Index, MultiIndexHash> sys_pos;
  Eigen::VectorXd g;
  GrowingMatrix store;
  BorderedLu lu;
  bool incremental = false;

  MultiIndexSet set = init;
  std::vector<MultiIndex> growth;
  std::vector<MultiIndex> adm;
  while (true) {
    adm = set.admissible();
    std::vector<MultiIndex> fresh;
    for (const auto& index : set.indices())
      if (!sys_pos.count(index)) fresh.push_back(index);
    for (const auto& index : adm)
      if (!sys_pos.count(index)) fresh.push_back(index);

    if (!fresh.empty()) {
      const auto old_k = static_cast<Eigen::Index>(sys.size());
      for (const auto& index : fresh) {
        sys_pos.emplace(index, static_cast<Eigen::Index>(sys.size()));
        sys.push_back(index);
      }
      const auto k = static_cast<Eigen::Index>(sys.size());
      const std::vector<int> levels = max_levels(sys, pdist.dim());
      grid.ensure(levels);
      tables.ensure(levels, grid.nodes());
      const Eigen::VectorXd fresh_values = values_cache.values(fresh, grid);
      g.conservativeResize(k);
      g.tail(k - old_k) = fresh_values;
      store.grow(k);
      auto a = store.view();
      for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index r = (c < old_k ? old_k : 0); r < k; ++r)
          a(r, c) = tables.entry(sys[static_cast<std::size_t>(r)], sys[static_cast<std::size_t>(c)]);
      lu.extend(a);
      incremental = true;
    }

    const auto a = store.view();
    Eigen::VectorXd c = lu.solve(g);
    c += lu.solve(Eigen::VectorXd(g - a * c));
    const double accept = 1e-8 * std::max(1.0, g.lpNorm<Eigen::Infinity>());
    if (incremental && !(residual_inf(a, c, g) <= accept)) {
      lu.reset(a);
      c = lu.solve(g);
      c += lu.solve(Eigen::VectorXd(g - a * c));
    }
    incremental = false;

    double total = 0.0;
    double largest = 0.0;
    for (const auto& index : adm) {
      const double mag = std::abs(c[sys_pos.at(index)]);
      total += mag;
      largest = std::max(largest, mag);
    }
    if (set.size() + adm.size() >= options.budget || total <= options.tolerance) break;

    const MultiIndex* chosen = nullptr;
    for (const auto& index : adm)
      if (std::abs(c[sys_pos.at(index)]) >= largest * (1.0 - 1e-14)) {
        chosen = &index;
        break;
      }
    const MultiIndex promoted = *chosen;
    set.insert(promoted);
    growth.push_back(promoted);
  }

  MultiIndexSet final_set = set;
  for (const auto& index : adm) final_set.insert(index);
  Eigen::VectorXd values(static_cast<Eigen::Index>(final_set.size()));
  for (std::size_t k = 0; k < final_set.size(); ++k) values[static_cast<Eigen::Index>(k)] = g[sys_pos.at(final_set[k])];
  PceSurrogate out = finish(pdist, final_set, grid, values);
  out.diagnostics.growth_order = std::move(growth);
  return out;
}

double eval_pce(const PceSurrogate& p, const Eigen::Ref<const Eigen::VectorXd>& y) {
  const std::size_t dim = p.set.dim();
  if (static_cast<std::size_t>(y.size()) != dim)
    throw DomainError("surrogate expects " + std::to_string(dim) + " inputs, got " + std::to_string(y.size()));
  std::vector<Eigen::VectorXd> psi(dim);
  for (std::size_t n = 0; n < dim; ++n)
    eval_orthonormal_all(p.recurrences[n], p.recurrences[n].max_degree, y[static_cast<Eigen::Index>(n)], psi[n]);
  double total = 0.0;
  for (std::size_t k = 0; k < p.set.size(); ++k) {
    double term = p.coefficients[static_cast<Eigen::Index>(k)];
    for (std::size_t n = 0; n < dim; ++n) term *= psi[n][p.set[k][n]];
    total += term;
  }
  return total;
}

Eigen::VectorXd eval_pce_batch(const PceSurrogate& p, const Eigen::MatrixXd& points) {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index q = 0; q < points.rows(); ++q) out[q] = eval_pce(p, points.row(q).transpose());
  return out;
}

}  // namespace lejapce
