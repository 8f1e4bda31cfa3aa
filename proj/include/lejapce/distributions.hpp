#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lejapce {

struct Interval {
  double lo;
  double hi;
  double width() const { return hi - lo; }
  bool contains(double y) const { return y >= lo && y <= hi; }
};

/// Tail mass dropped on each side of an unbounded support.
inline constexpr double kTailMass = 1e-8;

/// A univariate continuous input law. Immutable after construction.
///
/// Parameters are stored in model units. Normal laws are parameterized by
/// variance, not standard deviation.
class Distribution {
 public:
  enum class Kind { Uniform, Normal, TruncatedNormal, Gumbel };

  static Distribution uniform(double lo, double hi);
  static Distribution normal(double mean, double variance);
  static Distribution truncated_normal(double mean, double variance, double lo, double hi);
  static Distribution gumbel(double location, double scale);

  Kind kind() const { return kind_; }
  bool is_bounded() const { return kind_ == Kind::Uniform || kind_ == Kind::TruncatedNormal; }

  double pdf(double y) const;
  /// Natural log of the density; -inf outside the support.
  double log_pdf(double y) const;
  double cdf(double y) const;
  /// Inverse CDF. Throws DomainError unless 0 < q < 1.
  double quantile(double q) const;
  double median() const { return quantile(0.5); }
  double mean() const;

  /// Exact support for bounded laws, [quantile(tau), quantile(1 - tau)] otherwise.
  Interval effective_support() const;

  // Raw parameters, meaning depends on kind:
  //   Uniform: (lo, hi); Normal: (mean, variance);
  //   TruncatedNormal: (mean, variance, lo, hi); Gumbel: (location, scale).
  const std::vector<double>& parameters() const { return params_; }

  /// Short human readable form, e.g. "TN(0,1,0,3)".
  std::string describe() const;

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.kind_ == b.kind_ && a.params_ == b.params_;
  }

 private:
  Distribution(Kind kind, std::vector<double> params);

  double standard_cdf_trunc(double z) const;

  Kind kind_;
  std::vector<double> params_;
  // Cached for the truncated normal: sigma, standardized bounds, and the
  // normalization mass Phi(b) - Phi(a).
  double sigma_ = 0.0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double mass_ = 1.0;
};

/// Independent inputs; the joint density is the product of the marginals.
class ProductDistribution {
 public:
  ProductDistribution() = default;
  explicit ProductDistribution(std::vector<Distribution> dims);

  std::size_t dim() const { return dims_.size(); }
  const Distribution& operator[](std::size_t n) const { return dims_[n]; }
  const std::vector<Distribution>& marginals() const { return dims_; }

  double pdf(const Eigen::Ref<const Eigen::VectorXd>& y) const;

 private:
  std::vector<Distribution> dims_;
};

/// Deterministic 64-bit source: std::mt19937_64 mapped to (0,1) by taking
/// the top 53 bits and centering them in their cell, so results do not
/// depend on the standard library's distribution implementations.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
};

/// Draws `count` i.i.d. points by inverse transform; one row per point.
/// Throws DomainError when count < 1.
Eigen::MatrixXd sample(const ProductDistribution& pdist, std::size_t count, std::uint64_t seed);

}  // namespace lejapce
