#include "lejapce/postprocess.hpp"

#include <algorithm>
#include <map>

#include "lejapce/errors.hpp"

namespace lejapce {

namespace {

void check_sizes(const MultiIndexSet& set, const Eigen::VectorXd& coefficients) {
  if (static_cast<std::size_t>(coefficients.size()) != set.size())
    throw ContractViolation("one coefficient per multi-index expected");
}

}  // namespace

double mean(const MultiIndexSet& set, const Eigen::VectorXd& coefficients) {
  check_sizes(set, coefficients);
  const MultiIndex zero = MultiIndex::zero(set.dim());
  if (!set.contains(zero)) throw ContractViolation("the zero multi-index is not in the set");
  return coefficients[static_cast<Eigen::Index>(set.position(zero))];
}

double mean(const PceSurrogate& p) { return mean(p.set, p.coefficients); }

double variance(const MultiIndexSet& set, const Eigen::VectorXd& coefficients) {
  check_sizes(set, coefficients);
  double total = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k)
    if (!set[k].is_zero()) total += coefficients[static_cast<Eigen::Index>(k)] * coefficients[static_cast<Eigen::Index>(k)];
  return total;
}

double variance(const PceSurrogate& p) { return variance(p.set, p.coefficients); }

SensitivityReport sobol_indices(const MultiIndexSet& set, const Eigen::VectorXd& coefficients) {
  SensitivityReport report;
  report.mean = mean(set, coefficients);
  report.variance = variance(set, coefficients);
  if (!(report.variance > 0.0)) throw NumericalError("Sobol indices are undefined for a model with zero variance");
  const auto dim = static_cast<Eigen::Index>(set.dim());
  Eigen::VectorXd first = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const MultiIndex& index = set[k];
    if (index.is_zero()) continue;
    const double c2 = coefficients[static_cast<Eigen::Index>(k)] * coefficients[static_cast<Eigen::Index>(k)];
    for (Eigen::Index n = 0; n < dim; ++n)
      if (index[static_cast<std::size_t>(n)] != 0) {
        total[n] += c2;
        if (index.support_size() == 1) first[n] += c2;
      }
  }
  report.first_order = first / report.variance;
  report.total_order = total / report.variance;
  return report;
}

SensitivityReport sobol_indices(const PceSurrogate& p) { return sobol_indices(p.set, p.coefficients); }

std::vector<std::size_t> influential_dimensions(const SensitivityReport& report, double threshold) {
  std::vector<std::size_t> out;
  for (Eigen::Index n = 0; n < report.total_order.size(); ++n)
    if (report.total_order[n] >= threshold) out.push_back(static_cast<std::size_t>(n));
  return out;
}

std::vector<SupportShare> variance_by_support(const MultiIndexSet& set, const Eigen::VectorXd& coefficients) {
  const double total = variance(set, coefficients);
  std::map<std::vector<std::size_t>, double> groups;
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (set[k].is_zero()) continue;
    std::vector<std::size_t> support;
    for (std::size_t n = 0; n < set.dim(); ++n)
      if (set[k][n] != 0) support.push_back(n);
    groups[support] += coefficients[static_cast<Eigen::Index>(k)] * coefficients[static_cast<Eigen::Index>(k)];
  }
  std::vector<SupportShare> out;
  for (const auto& [support, v] : groups) out.push_back({support, v, total > 0.0 ? v / total : 0.0});
  std::stable_sort(out.begin(), out.end(),
                   [](const SupportShare& a, const SupportShare& b) { return a.support.size() < b.support.size(); });
  return out;
}

}  // namespace lejapce
