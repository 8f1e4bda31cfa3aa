#include "lejapce/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lejapce/errors.hpp"

namespace lejapce {

Model::Model(std::string name, ProductDistribution inputs) : name_(std::move(name)), inputs_(std::move(inputs)) {}

std::string format_point(const Eigen::Ref<const Eigen::VectorXd>& y) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (Eigen::Index n = 0; n < y.size(); ++n) os << (n ? ", " : "") << y[n];
  os << ']';
  return os.str();
}

void Model::check_result(const Eigen::Ref<const Eigen::VectorXd>& y, double value) const {
  if (!std::isfinite(value))
    throw ModelError("model '" + name_ + "' returned a non-finite value at y = " + format_point(y));
}

double Model::operator()(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (static_cast<std::size_t>(y.size()) != dimension())
    throw DomainError("model '" + name_ + "' expects " + std::to_string(dimension()) + " inputs, got " +
                      std::to_string(y.size()));
  const double value = evaluate(y);
  check_result(y, value);
  return value;
}

Eigen::VectorXd Model::evaluate_batch(const Eigen::MatrixXd& points) const {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index q = 0; q < points.rows(); ++q) out[q] = (*this)(points.row(q).transpose());
  return out;
}

FunctionModel::FunctionModel(std::string name, ProductDistribution inputs, Function fn)
    : Model(std::move(name), std::move(inputs)), fn_(std::move(fn)) {}

double FunctionModel::evaluate(const Eigen::Ref<const Eigen::VectorXd>& y) const { return fn_(y); }

double ishigami(const Eigen::Ref<const Eigen::VectorXd>& y) {
  constexpr double a = 7.0;
  constexpr double b = 0.1;
  const double s2 = std::sin(y[1]);
  return std::sin(y[0]) + a * s2 * s2 + b * std::pow(y[2], 4) * std::sin(y[0]);
}

double cantilever(const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double w = y[0], t = y[1], p_h = y[2], p_v = y[3];
  if (w == 0.0 || t == 0.0) throw ModelError("cantilever: zero width or thickness at y = " + format_point(y));
  return (600.0 * p_v + 600.0 * p_h) / (w * t * t);
}

double meromorphic(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& weights) {
  const double den = 1.0 + weights.dot(y);
  if (std::abs(den) < 1e-14) throw ModelError("meromorphic: pole at y = " + format_point(y));
  return 1.0 / den;
}

double borehole(const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double r_w = y[0], r = y[1], t_u = y[2], n_u = y[3], t_l = y[4], n_l = y[5], len = y[6], k_w = y[7];
  const double ratio = r / r_w;
  if (!(ratio > 0.0)) throw ModelError("borehole: nonpositive log argument at y = " + format_point(y));
  const double log_ratio = std::log(ratio);
  const double den = log_ratio * (1.0 + t_u / t_l + 2.0 * len * t_u / (log_ratio * r_w * r_w * k_w));
  return 2.0 * std::numbers::pi * t_u * (n_u - n_l) / den;
}

double steel_column(const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double f_s = y[0], p_d = y[1], p_1 = y[2], p_2 = y[3], b = y[4], d = y[5], h = y[6], f_0 = y[7], e = y[8],
               len = y[9];
  const double p_t = p_d + p_1 + p_2;
  const double e_b = std::numbers::pi * std::numbers::pi * e * b * d * h * h / (2.0 * len * len);
  if (e_b == p_t) throw ModelError("steel column: buckling singularity at y = " + format_point(y));
  return f_s - p_t * (1.0 / (2.0 * b * d) + f_0 * e_b / (b * d * h * (e_b - p_t)));
}

Eigen::VectorXd meromorphic_weights(const Eigen::Ref<const Eigen::VectorXd>& raw) {
  return raw / (2.0 * raw.lpNorm<1>());
}

Eigen::VectorXd meromorphic5_raw_weights() {
  Eigen::VectorXd w(5);
  w << 1.0, 0.5, 0.1, 0.05, 0.001;
  return w;
}

Eigen::VectorXd meromorphic16_raw_weights() {
  Eigen::VectorXd w(16);
  for (int k = 1; k <= 8; ++k) {
    w[2 * k - 2] = std::pow(10.0, 1 - k);
    w[2 * k - 1] = 5.0 * std::pow(10.0, -k);
  }
  return w;
}

ProductDistribution ishigami_inputs() {
  const auto u = Distribution::uniform(-std::numbers::pi, std::numbers::pi);
  return ProductDistribution({u, u, u});
}

ProductDistribution cantilever_inputs() {
  return ProductDistribution({Distribution::normal(4.0, 1e-4), Distribution::normal(2.0, 1e-4),
                              Distribution::normal(500.0, 1e4), Distribution::normal(1000.0, 1e4)});
}

ProductDistribution meromorphic5_inputs() {
  return ProductDistribution(std::vector<Distribution>(5, Distribution::uniform(-1.0, 1.0)));
}

ProductDistribution meromorphic16_inputs() {
  std::vector<Distribution> dims;
  for (int n = 1; n <= 16; ++n)
    dims.push_back(n % 2 == 1 ? Distribution::truncated_normal(0.0, 1.0, 0.0, 3.0)
                              : Distribution::truncated_normal(0.0, 1.0, -3.0, 0.0));
  return ProductDistribution(std::move(dims));
}

ProductDistribution borehole_inputs() {
  const auto tn = Distribution::truncated_normal;
  return ProductDistribution({
      // sd 0.0161812; the misprint 0.161812 seen in print pushes S_f(r_w) to about 0.88.
      tn(0.1, 0.0161812 * 0.0161812, 0.05, 0.15),
      tn(3700.0, 4900.0 * 4900.0, 100.0, 50000.0),
      tn(89335.0, 15164.0 * 15164.0, 63070.0, 115600.0),
      tn(1050.0, 34.64 * 34.64, 990.0, 1110.0),
      tn(89.5, 15.3 * 15.3, 63.1, 116.0),
      tn(760.0, 34.64 * 34.64, 700.0, 820.0),
      tn(1400.0, 161.66 * 161.66, 1120.0, 1680.0),
      tn(10950.0, 632.2 * 632.2, 9855.0, 12045.0),
  });
}

ProductDistribution steel_column_inputs() {
  const auto tn = Distribution::truncated_normal;
  const auto gumbel = Distribution::gumbel;
  return ProductDistribution({
      tn(400.0, 1225.0, 295.0, 505.0),
      tn(500000.0, 25e8, 350000.0, 650000.0),
      gumbel(559495.0, 70173.0),
      gumbel(559495.0, 70173.0),
      tn(300.0, 9.0, 291.0, 309.0),
      tn(20.0, 4.0, 14.0, 26.0),
      tn(300.0, 25.0, 285.0, 315.0),
      tn(30.0, 100.0, 0.0, 60.0),
      gumbel(208110.0, 3275.0),
      tn(7500.0, 56.25, 7470.0, 7530.0),
  });
}

std::vector<std::string> parameter_names(const std::string& model_name) {
  if (model_name == "cantilever") return {"w", "t", "P_h", "P_v"};
  if (model_name == "borehole") return {"r_w", "r", "T_u", "N_u", "T_l", "N_l", "L", "K_w"};
  if (model_name == "steel_column") return {"F_s", "P_d", "P_1", "P_2", "B", "D", "H", "F_0", "E", "L"};
  std::size_t dim = 0;
  if (model_name == "ishigami") dim = 3;
  if (model_name == "meromorphic5") dim = 5;
  if (model_name == "meromorphic16") dim = 16;
  std::vector<std::string> names;
  for (std::size_t n = 1; n <= dim; ++n) names.push_back("Y" + std::to_string(n));
  return names;
}

std::vector<std::string> builtin_model_names() {
  return {"ishigami", "cantilever", "meromorphic5", "meromorphic16", "borehole", "steel_column"};
}

std::unique_ptr<Model> make_builtin_model(const std::string& name) {
  if (name == "ishigami") return std::make_unique<FunctionModel>(name, ishigami_inputs(), ishigami);
  if (name == "cantilever") return std::make_unique<FunctionModel>(name, cantilever_inputs(), cantilever);
  if (name == "meromorphic5") {
    Eigen::VectorXd w = meromorphic_weights(meromorphic5_raw_weights());
    return std::make_unique<FunctionModel>(name, meromorphic5_inputs(),
                                           [w](const Eigen::Ref<const Eigen::VectorXd>& y) { return meromorphic(y, w); });
  }
  if (name == "meromorphic16") {
    Eigen::VectorXd w = meromorphic_weights(meromorphic16_raw_weights());
    return std::make_unique<FunctionModel>(name, meromorphic16_inputs(),
                                           [w](const Eigen::Ref<const Eigen::VectorXd>& y) { return meromorphic(y, w); });
  }
  if (name == "borehole") return std::make_unique<FunctionModel>(name, borehole_inputs(), borehole);
  if (name == "steel_column") return std::make_unique<FunctionModel>(name, steel_column_inputs(), steel_column);
  throw ConfigError("unknown built-in model '" + name + "'");
}

}  // namespace lejapce
