#include "lejapce/orthopoly.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace lejapce {

namespace {

constexpr int kPanelPoints = 20;
constexpr int kMinPanels = 8;
constexpr int kMaxPanels = 8192;
constexpr double kSettleTol = 1e-12;

// Coefficients of the orthonormal Legendre family on [-1,1] with unit mass.
RecurrenceTable legendre_unit(int max_degree) {
  RecurrenceTable rec;
  rec.max_degree = max_degree;
  rec.alpha = Eigen::VectorXd::Zero(max_degree + 1);
  rec.beta.resize(max_degree + 1);
  rec.beta[0] = 1.0;
  for (int k = 1; k <= max_degree; ++k) {
    const double kk = static_cast<double>(k) * k;
    rec.beta[k] = kk / (4.0 * kk - 1.0);
  }
  return rec;
}

// Composite Gauss-Legendre discretization of dist on [-1,1] after the affine
// map y = center + half * z. Weights are normalized to unit mass.
void discretize(const Distribution& dist, double center, double half, int panels, Eigen::VectorXd& z,
                Eigen::VectorXd& w) {
  static const GaussRule base = gauss_rule(legendre_unit(kPanelPoints), kPanelPoints);
  const int count = panels * kPanelPoints;
  z.resize(count);
  w.resize(count);
  const double h = 2.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = -1.0 + p * h;
    for (int j = 0; j < kPanelPoints; ++j) {
      const int k = p * kPanelPoints + j;
      z[k] = a + 0.5 * h * (base.nodes[j] + 1.0);
      w[k] = 0.5 * h * base.weights[j] * dist.pdf(center + half * z[k]);
    }
  }
  const double mass = w.sum();
  if (!(mass > 0.0)) throw NumericalError("Stieltjes: discretized measure has no mass");
  w /= mass;
}

// Stieltjes procedure on the discrete measure (z, w), in orthonormal form and
// extended precision. Returns coefficients of the monic recurrence in z.
std::pair<Eigen::VectorXd, Eigen::VectorXd> stieltjes(const Eigen::VectorXd& z, const Eigen::VectorXd& w,
                                                      int max_degree) {
  using Ext = long double;
  using ArrayXe = Eigen::Array<Ext, Eigen::Dynamic, 1>;
  const ArrayXe ze = z.array().cast<Ext>();
  const ArrayXe we = w.array().cast<Ext>();
  Eigen::VectorXd alpha(max_degree + 1), beta(max_degree + 1);
  const Ext mass = we.sum();
  beta[0] = static_cast<double>(mass);
  ArrayXe prev = ArrayXe::Zero(ze.size());
  ArrayXe cur = ArrayXe::Constant(ze.size(), 1.0L / std::sqrt(mass));
  Ext sqrt_beta = 0.0L;
  for (int k = 0; k <= max_degree; ++k) {
    const Ext a = (we * ze * cur.square()).sum();
    alpha[k] = static_cast<double>(a);
    if (k == max_degree) break;
    ArrayXe next = (ze - a) * cur - sqrt_beta * prev;
    const Ext b = (we * next.square()).sum();
    if (!(b > 0.0L) || !std::isfinite(static_cast<double>(b)) || !std::isfinite(alpha[k]))
      throw NumericalError("Stieltjes breakdown at degree " + std::to_string(k + 1));
    beta[k + 1] = static_cast<double>(b);
    sqrt_beta = std::sqrt(b);
    prev = std::move(cur);
    cur = next / sqrt_beta;
  }
  return {alpha, beta};
}

double max_rel_change(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1e-3));
  return worst;
}

RecurrenceTable build_stieltjes(const Distribution& dist, int max_degree) {
  const Interval support = dist.effective_support();
  const double center = 0.5 * (support.lo + support.hi);
  const double half = 0.5 * support.width();

  Eigen::VectorXd z, w;
  discretize(dist, center, half, kMinPanels, z, w);
  auto [alpha, beta] = stieltjes(z, w, max_degree);
  bool settled = false;
  for (int panels = 2 * kMinPanels; panels <= kMaxPanels; panels *= 2) {
    discretize(dist, center, half, panels, z, w);
    auto [a2, b2] = stieltjes(z, w, max_degree);
    const double change = std::max(max_rel_change(alpha, a2), max_rel_change(beta, b2));
    alpha = std::move(a2);
    beta = std::move(b2);
    if (change < kSettleTol) {
      settled = true;
      break;
    }
  }
  if (!settled)
    throw NumericalError("Stieltjes coefficients for " + dist.describe() + " did not settle up to degree " +
                         std::to_string(max_degree));

  RecurrenceTable rec;
  rec.max_degree = max_degree;
  rec.source = RecurrenceSource::Stieltjes;
  rec.alpha = center + half * alpha.array();
  rec.beta = half * half * beta.array();
  rec.beta[0] = 1.0;
  return rec;
}

}  // namespace

std::string to_string(RecurrenceSource source) {
  return source == RecurrenceSource::Analytic ? "analytic" : "stieltjes";
}

RecurrenceSource recurrence_source_from_string(const std::string& name) {
  if (name == "analytic") return RecurrenceSource::Analytic;
  if (name == "stieltjes") return RecurrenceSource::Stieltjes;
  throw ConfigError("unknown recurrence source '" + name + "'");
}

RecurrenceTable RecurrenceTable::truncated(int degree) const {
  if (degree > max_degree) throw DomainError("cannot extend a recurrence table by truncation");
  RecurrenceTable out;
  out.max_degree = degree;
  out.source = source;
  out.alpha = alpha.head(degree + 1);
  out.beta = beta.head(degree + 1);
  return out;
}

void RecurrenceTable::validate() const {
  if (max_degree < 0 || alpha.size() != max_degree + 1 || beta.size() != max_degree + 1)
    throw ConfigError("recurrence table: alpha/beta must hold max_degree + 1 entries");
  for (Eigen::Index k = 0; k < beta.size(); ++k)
    if (!(beta[k] > 0.0) || !std::isfinite(beta[k]) || !std::isfinite(alpha[k]))
      throw ConfigError("recurrence table: beta must be positive and finite");
}

RecurrenceTable build_recurrence(const Distribution& dist, int max_degree) {
  if (max_degree < 0) throw DomainError("max_degree must be non-negative");
  const bool analytic = dist.kind() == Distribution::Kind::Uniform || dist.kind() == Distribution::Kind::Normal;
  const int cap = analytic ? kMaxAnalyticDegree : kMaxPolynomialDegree;
  if (max_degree > cap)
    throw DomainError("polynomial degree " + std::to_string(max_degree) + " exceeds the supported maximum of " +
                      std::to_string(cap) + " for " + dist.describe());
  const auto& par = dist.parameters();
  switch (dist.kind()) {
    case Distribution::Kind::Uniform: {
      RecurrenceTable rec = legendre_unit(max_degree);
      const double center = 0.5 * (par[0] + par[1]);
      const double half = 0.5 * (par[1] - par[0]);
      rec.alpha.setConstant(center);
      rec.beta.tail(max_degree) *= half * half;
      return rec;
    }
    case Distribution::Kind::Normal: {
      RecurrenceTable rec;
      rec.max_degree = max_degree;
      rec.alpha = Eigen::VectorXd::Constant(max_degree + 1, par[0]);
      rec.beta.resize(max_degree + 1);
      rec.beta[0] = 1.0;
      for (int k = 1; k <= max_degree; ++k) rec.beta[k] = k * par[1];
      return rec;
    }
    case Distribution::Kind::TruncatedNormal:
    case Distribution::Kind::Gumbel:
      return build_stieltjes(dist, max_degree);
  }
  throw ConfigError("unsupported distribution");
}

RecurrenceTable cached_recurrence(const Distribution& dist, int max_degree) {
  if (max_degree > kMaxPolynomialDegree || max_degree < 0) return build_recurrence(dist, max_degree);
  if (dist.kind() == Distribution::Kind::Uniform || dist.kind() == Distribution::Kind::Normal)
    return build_recurrence(dist, max_degree);

  static std::mutex mutex;
  static std::map<std::pair<int, std::vector<double>>, RecurrenceTable> cache;
  const auto key = std::make_pair(static_cast<int>(dist.kind()), dist.parameters());
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_recurrence(dist, kMaxPolynomialDegree)).first;
  return it->second.truncated(max_degree);
}

void eval_orthonormal_all(const RecurrenceTable& rec, int degree, double y, Eigen::VectorXd& out) {
  if (degree < 0 || degree > rec.max_degree)
    throw DomainError("polynomial degree " + std::to_string(degree) + " exceeds table capacity " +
                      std::to_string(rec.max_degree));
  out.resize(degree + 1);
  out[0] = 1.0 / std::sqrt(rec.beta[0]);
  for (int k = 0; k < degree; ++k) {
    const double prev = k > 0 ? out[k - 1] : 0.0;
    out[k + 1] = ((y - rec.alpha[k]) * out[k] - std::sqrt(rec.beta[k]) * prev) / std::sqrt(rec.beta[k + 1]);
  }
}

GaussRule gauss_rule(const RecurrenceTable& rec, int n) {
  if (n < 1 || n > rec.max_degree + 1)
    throw DomainError("Gauss rule size " + std::to_string(n) + " outside [1, " +
                      std::to_string(rec.max_degree + 1) + "]");
  const Eigen::VectorXd diag = rec.alpha.head(n);
  const Eigen::VectorXd sub = rec.beta.segment(1, n - 1).cwiseSqrt();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolver did not converge");
  GaussRule rule;
  rule.nodes = solver.eigenvalues();
  // Christoffel numbers 1 / sum_k psi_k(x)^2 keep full relative accuracy for
  // tiny weights, unlike squared first eigenvector components.
  rule.weights.resize(n);
  Eigen::VectorXd psi;
  for (int i = 0; i < n; ++i) {
    eval_orthonormal_all(rec, n - 1, rule.nodes[i], psi);
    rule.weights[i] = 1.0 / psi.squaredNorm();
  }
  return rule;
}

double orthonormality_defect(const RecurrenceTable& rec, int up_to) {
  if (up_to < 0 || up_to > rec.max_degree) throw DomainError("orthonormality check beyond table capacity");
  const GaussRule rule = gauss_rule(rec, up_to + 1);
  Eigen::MatrixXd values(rule.nodes.size(), up_to + 1);
  Eigen::VectorXd psi;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    eval_orthonormal_all(rec, up_to, rule.nodes[i], psi);
    values.row(i) = psi.transpose();
  }
  const Eigen::MatrixXd gram = values.transpose() * rule.weights.asDiagonal() * values;
  return (gram - Eigen::MatrixXd::Identity(up_to + 1, up_to + 1)).cwiseAbs().maxCoeff();
}

}  // namespace lejapce
