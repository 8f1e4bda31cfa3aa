#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "lejapce/multiindex.hpp"
#include "lejapce/pce.hpp"

namespace lejapce {

/// Sobol indices below this are reported as negligible.
inline constexpr double kNegligibleSobol = 0.01;

struct SensitivityReport {
  double mean = 0.0;
  double variance = 0.0;
  Eigen::VectorXd first_order;
  Eigen::VectorXd total_order;
};

/// E[g] = c_0. Throws ContractViolation when the zero index is absent.
double mean(const MultiIndexSet& set, const Eigen::VectorXd& coefficients);
double mean(const PceSurrogate& p);

/// V[g] = sum of c_p^2 over the non-zero indices.
double variance(const MultiIndexSet& set, const Eigen::VectorXd& coefficients);
double variance(const PceSurrogate& p);

/// First- and total-order Sobol indices from the orthonormal coefficients.
/// Throws NumericalError if the variance is zero.
SensitivityReport sobol_indices(const MultiIndexSet& set, const Eigen::VectorXd& coefficients);
SensitivityReport sobol_indices(const PceSurrogate& p);

/// Dimensions whose total-order index reaches the threshold.
std::vector<std::size_t> influential_dimensions(const SensitivityReport& report,
                                                double threshold = kNegligibleSobol);

/// Variance share of one interaction support (the dimensions with p_n != 0).
struct SupportShare {
  std::vector<std::size_t> support;
  double variance = 0.0;
  double share = 0.0;
};

/// Partition of the variance by interaction support, sorted by support size
/// and then lexicographically. The variances add up to variance(p).
std::vector<SupportShare> variance_by_support(const MultiIndexSet& set, const Eigen::VectorXd& coefficients);

}  // namespace lejapce
