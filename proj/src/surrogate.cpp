#include "lejapce/surrogate.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "lejapce/errors.hpp"

namespace lejapce {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ConfigError(std::string("distribution spec needs a numeric '") + key + "': " + j.dump());
  return j.at(key).get<double>();
}

std::vector<double> reals(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(std::string(what) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Eigen::VectorXd vector_from(const json& j, const char* what) {
  const auto v = reals(j, what);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json vector_to(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("surrogate document lacks '") + key + "'");
  return j.at(key);
}

std::vector<std::vector<double>> node_lists(const json& j, std::size_t dim) {
  if (!j.is_array() || j.size() != dim) throw ConfigError("'nodes' must hold one list per dimension");
  std::vector<std::vector<double>> out;
  for (const auto& list : j) out.push_back(reals(list, "node list"));
  return out;
}

MultiIndexSet set_from(const json& j, std::size_t dim) {
  MultiIndexSet set = MultiIndexSet::from_list(dim, multi_indices_from_json(j, dim));
  if (set.empty() || !set.is_downward_closed()) throw ConfigError("'multi_indices' must form a downward-closed set");
  return set;
}

void check_nodes(const MultiIndexSet& set, const std::vector<std::vector<double>>& nodes) {
  const auto levels = set.max_degrees();
  for (std::size_t n = 0; n < nodes.size(); ++n)
    if (nodes[n].size() <= static_cast<std::size_t>(levels[n]))
      throw ConfigError("node list " + std::to_string(n) + " is shorter than the set requires");
}

}  // namespace

double eval_surrogate(const Surrogate& s, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (const auto* h = std::get_if<HierSurrogate>(&s)) return eval_hier(*h, y);
  return eval_pce(std::get<PceSurrogate>(s), y);
}

Eigen::VectorXd eval_surrogate_batch(const Surrogate& s, const Eigen::MatrixXd& points) {
  if (const auto* h = std::get_if<HierSurrogate>(&s)) return eval_hier_batch(*h, points);
  return eval_pce_batch(std::get<PceSurrogate>(s), points);
}

const ProductDistribution& input_distribution(const Surrogate& s) {
  return std::visit([](const auto& x) -> const ProductDistribution& { return x.pdist; }, s);
}

const MultiIndexSet& index_set(const Surrogate& s) {
  return std::visit([](const auto& x) -> const MultiIndexSet& { return x.set; }, s);
}

PceSurrogate as_pce(const Surrogate& s) {
  if (const auto* h = std::get_if<HierSurrogate>(&s)) return transform_to_pce(*h);
  return std::get<PceSurrogate>(s);
}

json distribution_to_json(const Distribution& d) {
  const auto& p = d.parameters();
  switch (d.kind()) {
    case Distribution::Kind::Uniform:
      return {{"kind", "uniform"}, {"lo", p[0]}, {"hi", p[1]}};
    case Distribution::Kind::Normal:
      return {{"kind", "normal"}, {"mu", p[0]}, {"var", p[1]}};
    case Distribution::Kind::TruncatedNormal:
      return {{"kind", "truncated_normal"}, {"mu", p[0]}, {"var", p[1]}, {"lo", p[2]}, {"hi", p[3]}};
    case Distribution::Kind::Gumbel:
      return {{"kind", "gumbel"}, {"loc", p[0]}, {"scale", p[1]}};
  }
  throw ConfigError("unsupported distribution");
}

Distribution distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("distribution spec needs a string 'kind': " + j.dump());
  const std::string kind = j.at("kind").get<std::string>();
  static const std::map<std::string, std::vector<std::string>> fields = {
      {"uniform", {"lo", "hi"}},
      {"normal", {"mu", "var"}},
      {"truncated_normal", {"mu", "var", "lo", "hi"}},
      {"gumbel", {"loc", "scale"}}};
  if (const auto it = fields.find(kind); it != fields.end())
    for (const auto& [key, value] : j.items())
      if (key != "kind" && std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError("unexpected key '" + key + "' in " + kind + " distribution spec");
  if (kind == "uniform") return Distribution::uniform(number(j, "lo"), number(j, "hi"));
  if (kind == "normal") return Distribution::normal(number(j, "mu"), number(j, "var"));
  if (kind == "truncated_normal")
    return Distribution::truncated_normal(number(j, "mu"), number(j, "var"), number(j, "lo"), number(j, "hi"));
  if (kind == "gumbel") return Distribution::gumbel(number(j, "loc"), number(j, "scale"));
  throw ConfigError("unknown distribution kind '" + kind + "'");
}

Distribution distribution_from_string(const std::string& text) {
  const auto first = text.find_first_not_of(" \t");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return distribution_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw ConfigError("distribution spec is not valid JSON: " + std::string(e.what()));
    }
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("distribution spec '" + text + "' lacks ':'");
  std::string kind = text.substr(0, colon);
  std::vector<double> args;
  std::istringstream in(text.substr(colon + 1));
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in distribution spec '" + text + "'");
    }
  }
  auto want = [&](std::size_t n) {
    if (args.size() != n)
      throw ConfigError("distribution '" + kind + "' takes " + std::to_string(n) + " parameters: '" + text + "'");
  };
  if (kind == "uniform" || kind == "U") {
    want(2);
    return Distribution::uniform(args[0], args[1]);
  }
  if (kind == "normal" || kind == "N") {
    want(2);
    return Distribution::normal(args[0], args[1]);
  }
  if (kind == "tn" || kind == "truncated_normal" || kind == "TN") {
    want(4);
    return Distribution::truncated_normal(args[0], args[1], args[2], args[3]);
  }
  if (kind == "gumbel" || kind == "G") {
    want(2);
    return Distribution::gumbel(args[0], args[1]);
  }
  throw ConfigError("unknown distribution kind '" + kind + "'");
}

json product_to_json(const ProductDistribution& p) {
  json out = json::array();
  for (const auto& d : p.marginals()) out.push_back(distribution_to_json(d));
  return out;
}

ProductDistribution product_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("'distributions' must be a non-empty array");
  std::vector<Distribution> dims;
  for (const auto& d : j) dims.push_back(distribution_from_json(d));
  return ProductDistribution(std::move(dims));
}

json multi_indices_to_json(const std::vector<MultiIndex>& indices) {
  json out = json::array();
  for (const auto& index : indices) out.push_back(index.entries());
  return out;
}

std::vector<MultiIndex> multi_indices_from_json(const json& j, std::size_t dim) {
  if (!j.is_array()) throw ConfigError("multi-indices must be an array of integer arrays");
  std::vector<MultiIndex> out;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != dim) throw ConfigError("multi-index of the wrong length: " + entry.dump());
    std::vector<int> values;
    for (const auto& x : entry) {
      if (!x.is_number_integer()) throw ConfigError("multi-index entries must be integers: " + entry.dump());
      values.push_back(x.get<int>());
    }
    out.emplace_back(std::move(values));
  }
  return out;
}

json surrogate_to_json(const Surrogate& s) {
  json out;
  out["format"] = kSurrogateFormat;
  if (const auto* h = std::get_if<HierSurrogate>(&s)) {
    out["basis"] = "newton-hier";
    out["distributions"] = product_to_json(h->pdist);
    out["nodes"] = h->nodes;
    out["multi_indices"] = multi_indices_to_json(h->set.indices());
    out["surpluses"] = vector_to(h->surpluses);
    out["values"] = vector_to(h->values);
    out["growth_order"] = multi_indices_to_json(h->growth_order);
    return out;
  }
  const auto& p = std::get<PceSurrogate>(s);
  out["basis"] = "orthonormal-pce";
  out["distributions"] = product_to_json(p.pdist);
  json recs = json::array();
  for (const auto& r : p.recurrences)
    recs.push_back({{"alpha", vector_to(r.alpha)}, {"beta", vector_to(r.beta)}, {"source", to_string(r.source)}});
  out["recurrences"] = recs;
  out["nodes"] = p.nodes;
  out["multi_indices"] = multi_indices_to_json(p.set.indices());
  out["coefficients"] = vector_to(p.coefficients);
  out["values"] = vector_to(p.values);
  out["diagnostics"] = {{"residual_inf", p.diagnostics.residual_inf},
                        {"residual_warning", p.diagnostics.residual_warning},
                        {"growth_order", multi_indices_to_json(p.diagnostics.growth_order)}};
  return out;
}

Surrogate surrogate_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("surrogate document must be a JSON object");
  if (!j.contains("format") || j.at("format") != kSurrogateFormat)
    throw ConfigError("unsupported surrogate format (expected " + std::to_string(kSurrogateFormat) + ")");
  const std::string basis = field(j, "basis").is_string() ? j.at("basis").get<std::string>() : "";
  const ProductDistribution pdist = product_from_json(field(j, "distributions"));
  const std::size_t dim = pdist.dim();
  const MultiIndexSet set = set_from(field(j, "multi_indices"), dim);
  const auto nodes = node_lists(field(j, "nodes"), dim);
  check_nodes(set, nodes);
  const Eigen::VectorXd values = vector_from(field(j, "values"), "values");
  if (static_cast<std::size_t>(values.size()) != set.size()) throw ConfigError("'values' must match 'multi_indices'");

  if (basis == "newton-hier") {
    HierSurrogate h;
    h.pdist = pdist;
    h.set = set;
    h.nodes = nodes;
    h.values = values;
    h.surpluses = vector_from(field(j, "surpluses"), "surpluses");
    if (static_cast<std::size_t>(h.surpluses.size()) != set.size())
      throw ConfigError("'surpluses' must match 'multi_indices'");
    if (j.contains("growth_order")) h.growth_order = multi_indices_from_json(j.at("growth_order"), dim);
    return h;
  }
  if (basis == "orthonormal-pce") {
    PceSurrogate p;
    p.pdist = pdist;
    p.set = set;
    p.nodes = nodes;
    p.values = values;
    p.coefficients = vector_from(field(j, "coefficients"), "coefficients");
    if (static_cast<std::size_t>(p.coefficients.size()) != set.size())
      throw ConfigError("'coefficients' must match 'multi_indices'");
    const json& recs = field(j, "recurrences");
    if (!recs.is_array() || recs.size() != dim) throw ConfigError("'recurrences' must hold one table per dimension");
    const auto levels = set.max_degrees();
    for (std::size_t n = 0; n < dim; ++n) {
      RecurrenceTable r;
      r.alpha = vector_from(field(recs[n], "alpha"), "alpha");
      r.beta = vector_from(field(recs[n], "beta"), "beta");
      r.max_degree = static_cast<int>(r.alpha.size()) - 1;
      r.source = recurrence_source_from_string(field(recs[n], "source").get<std::string>());
      r.validate();
      if (r.max_degree < levels[n]) throw ConfigError("recurrence table too short for the set");
      p.recurrences.push_back(std::move(r));
    }
    if (j.contains("diagnostics")) {
      const json& d = j.at("diagnostics");
      p.diagnostics.residual_inf = d.value("residual_inf", 0.0);
      p.diagnostics.residual_warning = d.value("residual_warning", false);
      if (d.contains("growth_order")) p.diagnostics.growth_order = multi_indices_from_json(d.at("growth_order"), dim);
    }
    return p;
  }
  throw ConfigError("unknown surrogate basis '" + basis + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

void save_surrogate(const std::string& path, const Surrogate& s) { write_text_file(path, surrogate_to_json(s).dump(1) + "\n"); }

Surrogate load_surrogate(const std::string& path) {
  try {
    return surrogate_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

}  // namespace lejapce
