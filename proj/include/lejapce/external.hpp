#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lejapce/models.hpp"

namespace lejapce {

struct ExternalModelSpec {
  std::string name = "external";
  /// argv of the child; the first entry is looked up on PATH.
  std::vector<std::string> command;
  ProductDistribution inputs;
  /// Number of child processes sharing a batch.
  std::size_t pool_size = 1;
  /// Longest wait for any single response, in seconds.
  double timeout_seconds = 30.0;
};

/// Model evaluated by child processes speaking line-delimited JSON on their
/// stdin/stdout:
///
///   request  {"id": k, "y": [...]}
///   response {"id": k, "value": v}  or  {"id": k, "error": "message"}
///
/// Responses may come back in any order. Children are started on first use
/// and restarted after a failure. Exits, malformed lines, reported errors and
/// timeouts raise ModelError with the offending line or point.
class ExternalModel : public Model {
 public:
  explicit ExternalModel(ExternalModelSpec spec);
  ~ExternalModel() override;

  ExternalModel(const ExternalModel&) = delete;
  ExternalModel& operator=(const ExternalModel&) = delete;

  Eigen::VectorXd evaluate_batch(const Eigen::MatrixXd& points) const override;
  const ExternalModelSpec& spec() const { return spec_; }

 protected:
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& y) const override;

 private:
  struct Pool;
  ExternalModelSpec spec_;
  std::unique_ptr<Pool> pool_;
};

std::unique_ptr<Model> external_model(ExternalModelSpec spec);

}  // namespace lejapce
