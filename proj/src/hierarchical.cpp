#include "lejapce/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace lejapce {

namespace {

// q_i with nu^i(y) = nu^{i-1}(y) (y - y_{i-1}) q_i, built from O(1)-sized
// ratios so long node lists neither overflow nor underflow.
std::vector<double> newton_factors(const std::vector<double>& nodes) {
  std::vector<double> q(nodes.size(), 1.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    double value = 1.0 / (nodes[i] - nodes[i - 1]);
    for (std::size_t k = 0; k + 1 < i; ++k) value *= (nodes[i - 1] - nodes[k]) / (nodes[i] - nodes[k]);
    q[i] = value;
  }
  return q;
}

using Factors = std::vector<std::vector<double>>;

Factors all_factors(const std::vector<std::vector<double>>& nodes) {
  Factors out;
  for (const auto& list : nodes) out.push_back(newton_factors(list));
  return out;
}

// sum_k coeffs[k] N_{indices[k]}(y) over the first `count` indices.
double hier_sum(const std::vector<MultiIndex>& indices, const Eigen::Ref<const Eigen::VectorXd>& coeffs, std::size_t count,
                const std::vector<std::vector<double>>& nodes, const Factors& factors,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
  const std::size_t dim = nodes.size();
  std::vector<int> max_level(dim, 0);
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t n = 0; n < dim; ++n) max_level[n] = std::max(max_level[n], indices[k][n]);
  std::vector<std::vector<double>> nu(dim);
  for (std::size_t n = 0; n < dim; ++n) {
    const double yn = y[static_cast<Eigen::Index>(n)];
    auto& out = nu[n];
    out.resize(static_cast<std::size_t>(max_level[n]) + 1);
    out[0] = 1.0;
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = out[i - 1] * (yn - nodes[n][i - 1]) * factors[n][i];
  }
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    double term = coeffs[static_cast<Eigen::Index>(k)];
    for (std::size_t n = 0; n < dim && term != 0.0; ++n) term *= nu[n][static_cast<std::size_t>(indices[k][n])];
    total += term;
  }
  return total;
}

void check_init(const ProductDistribution& pdist, const MultiIndexSet& init) {
  if (init.dim() != pdist.dim()) throw ConfigError("initial multi-index set has the wrong dimension");
  if (init.empty() || !init.is_downward_closed())
    throw ConfigError("initial multi-index set must be non-empty and downward closed");
}

}  // namespace

double eval_hier(const HierSurrogate& s, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (static_cast<std::size_t>(y.size()) != s.set.dim())
    throw DomainError("surrogate expects " + std::to_string(s.set.dim()) + " inputs, got " + std::to_string(y.size()));
  return hier_sum(s.set.indices(), s.surpluses, s.set.size(), s.nodes, all_factors(s.nodes), y);
}

Eigen::VectorXd eval_hier_batch(const HierSurrogate& s, const Eigen::MatrixXd& points) {
  if (static_cast<std::size_t>(points.cols()) != s.set.dim())
    throw DomainError("surrogate expects " + std::to_string(s.set.dim()) + " inputs, got " +
                      std::to_string(points.cols()));
  const Factors factors = all_factors(s.nodes);
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index q = 0; q < points.rows(); ++q)
    out[q] = hier_sum(s.set.indices(), s.surpluses, s.set.size(), s.nodes, factors, points.row(q).transpose());
  return out;
}

double surplus(const Model& model, const HierSurrogate& s, const MultiIndex& index) {
  if (!s.set.empty() && !s.set.contains(index)) {
    const auto adm = s.set.admissible();
    if (std::find(adm.begin(), adm.end(), index) == adm.end())
      throw ContractViolation("surplus requested for a multi-index outside the admissible set");
  }
  LejaGrid grid(s.pdist);
  const Eigen::VectorXd y = grid.point(index);
  const double g = model(y);
  if (s.set.empty()) return g;
  return g - hier_sum(s.set.indices(), s.surpluses, s.set.size(), grid.nodes(), all_factors(grid.nodes()), y);
}

HierSurrogate build_hier(const Model& model, const ProductDistribution& pdist, const MultiIndexSet& set,
                         EvaluationCache* cache) {
  check_init(pdist, set);
  EvaluationCache local(model);
  EvaluationCache& values_cache = cache ? *cache : local;
  LejaGrid grid(pdist);
  grid.ensure(set.max_degrees());

  HierSurrogate out{pdist, set, Eigen::VectorXd(static_cast<Eigen::Index>(set.size())), {}, {}, {}};
  out.values = values_cache.values(set.indices(), grid);
  const Factors factors = all_factors(grid.nodes());
  for (std::size_t k = 0; k < set.size(); ++k) {
    const Eigen::VectorXd y = node_for(set[k], grid.nodes());
    out.surpluses[static_cast<Eigen::Index>(k)] =
        out.values[static_cast<Eigen::Index>(k)] - hier_sum(set.indices(), out.surpluses, k, grid.nodes(), factors, y);
  }
  out.nodes = grid.nodes();
  return out;
}

HierSurrogate adapt_hier(const Model& model, const ProductDistribution& pdist, const MultiIndexSet& init,
                         const AdaptOptions& options, EvaluationCache* cache) {
  check_init(pdist, init);
  if (options.budget < init.size() + init.admissible().size())
    throw ConfigError("budget " + std::to_string(options.budget) + " is smaller than the initial set plus its frontier (" +
                      std::to_string(init.size() + init.admissible().size()) + ")");
  if (!(options.tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");

  EvaluationCache local(model);
  EvaluationCache& values_cache = cache ? *cache : local;
  LejaGrid grid(pdist);

  HierSurrogate base = build_hier(model, pdist, init, &values_cache);
  MultiIndexSet set = init;
  std::vector<double> set_surpluses(base.surpluses.data(), base.surpluses.data() + base.surpluses.size());
  std::unordered_map<MultiIndex, std::pair<double, double>, MultiIndexHash> frontier;  // surplus, value
  std::vector<MultiIndex> growth;
  Factors factors(pdist.dim());

  std::vector<MultiIndex> adm;
  while (true) {
    adm = set.admissible();
    std::vector<MultiIndex> fresh;
    for (const auto& index : adm)
      if (!frontier.count(index)) fresh.push_back(index);
    if (!fresh.empty()) {
      const Eigen::VectorXd g = values_cache.values(fresh, grid);
      for (std::size_t n = 0; n < pdist.dim(); ++n)
        if (factors[n].size() != grid.nodes()[n].size()) factors[n] = newton_factors(grid.nodes()[n]);
      const Eigen::Map<const Eigen::VectorXd> coeffs(set_surpluses.data(), static_cast<Eigen::Index>(set_surpluses.size()));
      for (std::size_t k = 0; k < fresh.size(); ++k) {
        const Eigen::VectorXd y = node_for(fresh[k], grid.nodes());
        const double gk = g[static_cast<Eigen::Index>(k)];
        frontier[fresh[k]] = {gk - hier_sum(set.indices(), coeffs, set.size(), grid.nodes(), factors, y), gk};
      }
    }

    double total = 0.0;
    double largest = 0.0;
    for (const auto& index : adm) {
      const double mag = std::abs(frontier.at(index).first);
      total += mag;
      largest = std::max(largest, mag);
    }
    if (set.size() + adm.size() >= options.budget || total <= options.tolerance) break;

    // adm is lexicographically sorted, so the first near-maximal entry wins.
    const MultiIndex* chosen = nullptr;
    for (const auto& index : adm)
      if (std::abs(frontier.at(index).first) >= largest * (1.0 - 1e-14)) {
        chosen = &index;
        break;
      }
    const MultiIndex promoted = *chosen;
    set.insert(promoted);
    set_surpluses.push_back(frontier.at(promoted).first);
    frontier.erase(promoted);
    growth.push_back(promoted);
  }

  HierSurrogate out;
  out.pdist = pdist;
  out.set = set;
  for (const auto& index : adm) out.set.insert(index);
  out.surpluses.resize(static_cast<Eigen::Index>(out.set.size()));
  for (std::size_t k = 0; k < set.size(); ++k) out.surpluses[static_cast<Eigen::Index>(k)] = set_surpluses[k];
  for (std::size_t k = 0; k < adm.size(); ++k)
    out.surpluses[static_cast<Eigen::Index>(set.size() + k)] = frontier.at(adm[k]).first;
  grid.ensure(out.set.max_degrees());
  out.values = values_cache.values(out.set.indices(), grid);
  out.nodes = grid.nodes();
  out.growth_order = std::move(growth);
  return out;
}

}  // namespace lejapce
