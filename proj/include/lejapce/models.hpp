#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lejapce/distributions.hpp"

namespace lejapce {

/// A scalar quantity of interest g(y) together with its canonical inputs.
class Model {
 public:
  Model(std::string name, ProductDistribution inputs);
  virtual ~Model() = default;

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return inputs_.dim(); }
  const ProductDistribution& input_spec() const { return inputs_; }

  /// Checked evaluation: throws DomainError on a dimension mismatch and
  /// ModelError (naming the point) on non-finite output.
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& y) const;

  /// Evaluates every row of `points`. The default loops over operator();
  /// external models override it to pipeline requests.
  virtual Eigen::VectorXd evaluate_batch(const Eigen::MatrixXd& points) const;

 protected:
  virtual double evaluate(const Eigen::Ref<const Eigen::VectorXd>& y) const = 0;
  void check_result(const Eigen::Ref<const Eigen::VectorXd>& y, double value) const;

 private:
  std::string name_;
  ProductDistribution inputs_;
};

/// Model backed by an in-process callable.
class FunctionModel : public Model {
 public:
  using Function = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;
  FunctionModel(std::string name, ProductDistribution inputs, Function fn);

 protected:
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& y) const override;

 private:
  Function fn_;
};

std::string format_point(const Eigen::Ref<const Eigen::VectorXd>& y);

// Benchmark functions. Inputs follow the order documented on each.

/// sin(y1) + 7 sin^2(y2) + 0.1 y3^4 sin(y1).
double ishigami(const Eigen::Ref<const Eigen::VectorXd>& y);
/// Beam stress (600 P_v + 600 P_h) / (w t^2); y = (w, t, P_h, P_v).
double cantilever(const Eigen::Ref<const Eigen::VectorXd>& y);
/// 1 / (1 + w . y).
double meromorphic(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& weights);
/// Flow through a borehole in m^3/yr; y = (r_w, r, T_u, N_u, T_l, N_l, L, K_w).
double borehole(const Eigen::Ref<const Eigen::VectorXd>& y);
/// Steel column limit state; y = (F_s, P_d, P_1, P_2, B, D, H, F_0, E, L).
double steel_column(const Eigen::Ref<const Eigen::VectorXd>& y);

/// Normalized anisotropy weights w = w_hat / (2 ||w_hat||_1).
Eigen::VectorXd meromorphic_weights(const Eigen::Ref<const Eigen::VectorXd>& raw);
/// Raw 5-D weights (1, 0.5, 0.1, 0.05, 0.001).
Eigen::VectorXd meromorphic5_raw_weights();
/// Raw 16-D weights: 10^(1-k) and 5 * 10^(-k) alternating for k = 1..8.
Eigen::VectorXd meromorphic16_raw_weights();

ProductDistribution ishigami_inputs();
ProductDistribution cantilever_inputs();
ProductDistribution meromorphic5_inputs();
ProductDistribution meromorphic16_inputs();
ProductDistribution borehole_inputs();
ProductDistribution steel_column_inputs();

/// Parameter labels used in reports.
std::vector<std::string> parameter_names(const std::string& model_name);

/// Names accepted by make_builtin_model.
std::vector<std::string> builtin_model_names();

/// One of: ishigami, cantilever, meromorphic5, meromorphic16, borehole,
/// steel_column. Throws ConfigError for unknown names.
std::unique_ptr<Model> make_builtin_model(const std::string& name);

}  // namespace lejapce
