#include "lejapce/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "lejapce/errors.hpp"

namespace lejapce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// Lower and upper standard normal tail probabilities, both accurate in their
// own tail.
double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double std_normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double std_normal_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p); }
double std_normal_isf(double s) { return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * s); }

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

Distribution::Distribution(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {
  for (double p : params_) require(std::isfinite(p), "distribution parameters must be finite");
  switch (kind_) {
    case Kind::Uniform:
      require(params_[0] < params_[1], "uniform: lower bound must be below upper bound");
      break;
    case Kind::Normal:
      require(params_[1] > 0.0, "normal: variance must be positive");
      break;
    case Kind::TruncatedNormal: {
      require(params_[1] > 0.0, "truncated normal: variance must be positive");
      require(params_[2] < params_[3], "truncated normal: lower bound must be below upper bound");
      sigma_ = std::sqrt(params_[1]);
      alpha_ = (params_[2] - params_[0]) / sigma_;
      beta_ = (params_[3] - params_[0]) / sigma_;
      mass_ = alpha_ > 0.0 ? std_normal_sf(alpha_) - std_normal_sf(beta_)
                           : std_normal_cdf(beta_) - std_normal_cdf(alpha_);
      require(mass_ > 0.0, "truncated normal: truncation range carries no probability mass");
      break;
    }
    case Kind::Gumbel:
      require(params_[1] > 0.0, "gumbel: scale must be positive");
      break;
  }
}

Distribution Distribution::uniform(double lo, double hi) { return Distribution(Kind::Uniform, {lo, hi}); }

Distribution Distribution::normal(double mean, double variance) {
  return Distribution(Kind::Normal, {mean, variance});
}

Distribution Distribution::truncated_normal(double mean, double variance, double lo, double hi) {
  return Distribution(Kind::TruncatedNormal, {mean, variance, lo, hi});
}

Distribution Distribution::gumbel(double location, double scale) {
  return Distribution(Kind::Gumbel, {location, scale});
}

double Distribution::pdf(double y) const {
  switch (kind_) {
    case Kind::Uniform:
      return (y < params_[0] || y > params_[1]) ? 0.0 : 1.0 / (params_[1] - params_[0]);
    case Kind::Normal: {
      const double s = std::sqrt(params_[1]);
      return std_normal_pdf((y - params_[0]) / s) / s;
    }
    case Kind::TruncatedNormal:
      if (y < params_[2] || y > params_[3]) return 0.0;
      return std_normal_pdf((y - params_[0]) / sigma_) / (sigma_ * mass_);
    case Kind::Gumbel: {
      const double z = (y - params_[0]) / params_[1];
      return std::exp(-(z + std::exp(-z))) / params_[1];
    }
  }
  return 0.0;
}

double Distribution::log_pdf(double y) const {
  switch (kind_) {
    case Kind::Uniform:
      return (y < params_[0] || y > params_[1]) ? -kInf : -std::log(params_[1] - params_[0]);
    case Kind::Normal: {
      const double s = std::sqrt(params_[1]);
      const double z = (y - params_[0]) / s;
      return -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    case Kind::TruncatedNormal: {
      if (y < params_[2] || y > params_[3]) return -kInf;
      const double z = (y - params_[0]) / sigma_;
      return -0.5 * z * z - std::log(sigma_ * mass_) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    case Kind::Gumbel: {
      const double z = (y - params_[0]) / params_[1];
      return -(z + std::exp(-z)) - std::log(params_[1]);
    }
  }
  return -kInf;
}

double Distribution::standard_cdf_trunc(double z) const {
  if (z <= alpha_) return 0.0;
  if (z >= beta_) return 1.0;
  return alpha_ > 0.0 ? (std_normal_sf(alpha_) - std_normal_sf(z)) / mass_
                      : (std_normal_cdf(z) - std_normal_cdf(alpha_)) / mass_;
}

double Distribution::cdf(double y) const {
  switch (kind_) {
    case Kind::Uniform:
      if (y <= params_[0]) return 0.0;
      if (y >= params_[1]) return 1.0;
      return (y - params_[0]) / (params_[1] - params_[0]);
    case Kind::Normal:
      return std_normal_cdf((y - params_[0]) / std::sqrt(params_[1]));
    case Kind::TruncatedNormal:
      return standard_cdf_trunc((y - params_[0]) / sigma_);
    case Kind::Gumbel:
      return std::exp(-std::exp(-(y - params_[0]) / params_[1]));
  }
  return 0.0;
}

double Distribution::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0,1), got " + fmt_num(q));
  switch (kind_) {
    case Kind::Uniform:
      return params_[0] + q * (params_[1] - params_[0]);
    case Kind::Normal:
      return params_[0] + std::sqrt(params_[1]) * std_normal_quantile(q);
    case Kind::TruncatedNormal: {
      double z = alpha_ > 0.0 ? std_normal_isf(std_normal_sf(alpha_) - q * mass_)
                              : std_normal_quantile(std_normal_cdf(alpha_) + q * mass_);
      // Newton polish on the truncated CDF, then bracket into the support.
      for (int it = 0; it < 3; ++it) {
        const double f = standard_cdf_trunc(z) - q;
        const double d = std_normal_pdf(z) / mass_;
        if (d <= 0.0 || !std::isfinite(f / d)) break;
        z -= f / d;
      }
      z = std::clamp(z, alpha_, beta_);
      return params_[0] + sigma_ * z;
    }
    case Kind::Gumbel:
      return params_[0] - params_[1] * std::log(-std::log(q));
  }
  return 0.0;
}

double Distribution::mean() const {
  switch (kind_) {
    case Kind::Uniform:
      return 0.5 * (params_[0] + params_[1]);
    case Kind::Normal:
      return params_[0];
    case Kind::TruncatedNormal:
      return params_[0] + sigma_ * (std_normal_pdf(alpha_) - std_normal_pdf(beta_)) / mass_;
    case Kind::Gumbel:
      return params_[0] + params_[1] * std::numbers::egamma;
  }
  return 0.0;
}

Interval Distribution::effective_support() const {
  switch (kind_) {
    case Kind::Uniform:
      return {params_[0], params_[1]};
    case Kind::TruncatedNormal:
      return {params_[2], params_[3]};
    case Kind::Normal:
    case Kind::Gumbel:
      return {quantile(kTailMass), quantile(1.0 - kTailMass)};
  }
  return {0.0, 0.0};
}

std::string Distribution::describe() const {
  std::string name;
  switch (kind_) {
    case Kind::Uniform: name = "U"; break;
    case Kind::Normal: name = "N"; break;
    case Kind::TruncatedNormal: name = "TN"; break;
    case Kind::Gumbel: name = "G"; break;
  }
  name += '(';
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (i) name += ',';
    name += fmt_num(params_[i]);
  }
  return name + ')';
}

ProductDistribution::ProductDistribution(std::vector<Distribution> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ConfigError("product distribution needs at least one dimension");
}

double ProductDistribution::pdf(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (static_cast<std::size_t>(y.size()) != dims_.size()) throw DomainError("dimension mismatch in pdf");
  double p = 1.0;
  for (std::size_t n = 0; n < dims_.size(); ++n) p *= dims_[n].pdf(y[static_cast<Eigen::Index>(n)]);
  return p;
}

UniformStream::UniformStream(std::uint64_t seed) : engine_(seed) {}

double UniformStream::next() {
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

Eigen::MatrixXd sample(const ProductDistribution& pdist, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw DomainError("sample count must be at least 1");
  UniformStream stream(seed);
  const auto n_dim = static_cast<Eigen::Index>(pdist.dim());
  Eigen::MatrixXd points(static_cast<Eigen::Index>(count), n_dim);
  for (Eigen::Index q = 0; q < points.rows(); ++q)
    for (Eigen::Index n = 0; n < n_dim; ++n)
      points(q, n) = pdist[static_cast<std::size_t>(n)].quantile(stream.next());
  return points;
}

}  // namespace lejapce
