#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "lejapce/distributions.hpp"
#include "lejapce/errors.hpp"

namespace lejapce {

/// Highest degree of a Stieltjes-built basis. Beyond it the discretized
/// measure no longer pins the coefficients down, so we refuse.
inline constexpr int kMaxPolynomialDegree = 60;
/// Highest degree for the closed-form Legendre and Hermite tables.
inline constexpr int kMaxAnalyticDegree = 2000;

enum class RecurrenceSource { Analytic, Stieltjes };

std::string to_string(RecurrenceSource source);
RecurrenceSource recurrence_source_from_string(const std::string& name);

/// Three-term recurrence coefficients of the monic orthogonal family of a
/// probability measure:
///
///   pi_{k+1}(y) = (y - alpha[k]) pi_k(y) - beta[k] pi_{k-1}(y),
///
/// with beta[0] the total mass. alpha and beta both hold max_degree + 1
/// entries, enough to evaluate degree max_degree and to build Gauss rules of
/// up to max_degree + 1 points.
struct RecurrenceTable {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  int max_degree = 0;
  RecurrenceSource source = RecurrenceSource::Analytic;

  /// Table restricted to a smaller degree.
  RecurrenceTable truncated(int degree) const;
  /// Throws ConfigError if sizes disagree or some beta is not positive.
  void validate() const;
};

/// Recurrence for the law of `dist` up to `max_degree`.
///
/// Uniform and normal laws use the Legendre and Hermite coefficients mapped
/// to the law's location and scale. Truncated normal and Gumbel laws run the
/// discretized Stieltjes procedure on a composite Gauss-Legendre
/// discretization of the effective support, doubling the panel count until
/// the coefficients settle.
RecurrenceTable build_recurrence(const Distribution& dist, int max_degree);

/// Same as build_recurrence but memoized per distribution. Stieltjes tables
/// are always built to kMaxPolynomialDegree and truncated, so the returned
/// coefficients do not depend on call order.
RecurrenceTable cached_recurrence(const Distribution& dist, int max_degree);

/// Orthonormal polynomial of the given degree at y.
template <typename Scalar>
Scalar eval_orthonormal(const RecurrenceTable& rec, int degree, Scalar y) {
  if (degree < 0 || degree > rec.max_degree)
    throw DomainError("polynomial degree " + std::to_string(degree) + " exceeds table capacity " +
                      std::to_string(rec.max_degree));
  Scalar prev(0);
  Scalar cur = Scalar(1) / std::sqrt(Scalar(rec.beta[0]));
  for (int k = 0; k < degree; ++k) {
    const Scalar next = ((y - Scalar(rec.alpha[k])) * cur - std::sqrt(Scalar(rec.beta[k])) * prev) /
                        std::sqrt(Scalar(rec.beta[k + 1]));
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Values psi^0(y), ..., psi^degree(y) written to `out` (resized).
void eval_orthonormal_all(const RecurrenceTable& rec, int degree, double y, Eigen::VectorXd& out);

struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point Gauss rule of the measure by Golub-Welsch on the Jacobi matrix.
/// Nodes ascending; weights sum to beta[0].
GaussRule gauss_rule(const RecurrenceTable& rec, int n);

/// max_{p,q <= up_to} |E[psi^p psi^q] - delta_pq| using an (up_to+1)-point
/// Gauss rule of the table's own measure.
double orthonormality_defect(const RecurrenceTable& rec, int up_to);

}  // namespace lejapce
