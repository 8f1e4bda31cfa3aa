#pragma once

#include <string>
#include <variant>

#include <Eigen/Dense>
#include <json.hpp>

#include "lejapce/distributions.hpp"
#include "lejapce/hierarchical.hpp"
#include "lejapce/pce.hpp"

namespace lejapce {

/// Either kind of surrogate the library builds.
using Surrogate = std::variant<HierSurrogate, PceSurrogate>;

inline constexpr int kSurrogateFormat = 1;

double eval_surrogate(const Surrogate& s, const Eigen::Ref<const Eigen::VectorXd>& y);
Eigen::VectorXd eval_surrogate_batch(const Surrogate& s, const Eigen::MatrixXd& points);
const ProductDistribution& input_distribution(const Surrogate& s);
const MultiIndexSet& index_set(const Surrogate& s);
/// PCE view of a surrogate; hierarchical ones go through transform_to_pce.
PceSurrogate as_pce(const Surrogate& s);

// Distribution specs, e.g. {"kind":"truncated_normal","mu":0,"var":1,"lo":0,"hi":3}.
// Malformed specs raise ConfigError.
nlohmann::json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j);
/// JSON spec or shorthand "uniform:lo,hi", "normal:mu,var",
/// "tn:mu,var,lo,hi", "gumbel:loc,scale".
Distribution distribution_from_string(const std::string& text);
nlohmann::json product_to_json(const ProductDistribution& p);
ProductDistribution product_from_json(const nlohmann::json& j);

nlohmann::json multi_indices_to_json(const std::vector<MultiIndex>& indices);
std::vector<MultiIndex> multi_indices_from_json(const nlohmann::json& j, std::size_t dim);

/// Versioned surrogate documents with basis "newton-hier" or
/// "orthonormal-pce".
nlohmann::json surrogate_to_json(const Surrogate& s);
Surrogate surrogate_from_json(const nlohmann::json& j);

void save_surrogate(const std::string& path, const Surrogate& s);
Surrogate load_surrogate(const std::string& path);

/// Parses a JSON file, raising ConfigError with the path on failure.
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace lejapce
