#include "lejapce/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>

#include "lejapce/errors.hpp"
#include "lejapce/hierarchical.hpp"
#include "lejapce/pce.hpp"

namespace lejapce {

using nlohmann::json;

namespace {

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Moments of the built-ins from 10^7 Sobol points, computed with
// lejapce_reference_moments.
struct PinnedMoments {
  const char* model;
  double mean;
  double variance;
};
constexpr PinnedMoments kQmcMoments[] = {
    {"cantilever", 5.625457200026e+04, 2.846875711654e+07},
    {"meromorphic5", 1.042303967521e+00, 4.892169877185e-02},
    {"meromorphic16", 9.105179607587e-01, 2.512882479965e-02},
    {"borehole", 7.334724896989e+01, 7.050544209138e+02},
    {"steel_column", 2.221352876979e+02, 1.910683829146e+03},
};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <typename T>
T get_as(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

std::size_t get_count(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
  return v.get<std::size_t>();
}

ExternalModelSpec external_from_json(const json& j) {
  check_keys(j, {"name", "command", "pool", "timeout"}, "model");
  ExternalModelSpec spec;
  if (j.contains("name")) spec.name = get_as<std::string>(j, "name", "model");
  if (!j.contains("command")) throw ConfigError("external model needs a 'command'");
  const json& cmd = j.at("command");
  if (cmd.is_string()) {
    std::istringstream words(cmd.get<std::string>());
    for (std::string w; words >> w;) spec.command.push_back(w);
  } else {
    spec.command = get_as<std::vector<std::string>>(j, "command", "model");
  }
  if (j.contains("pool")) spec.pool_size = get_count(j, "pool", "model");
  if (j.contains("timeout")) spec.timeout_seconds = get_as<double>(j, "timeout", "model");
  return spec;
}

std::optional<double> sobol_error(const Eigen::VectorXd& estimate, const ReferenceStats& refs, bool total) {
  std::optional<double> worst;
  for (const auto& r : refs.sobol) {
    const std::optional<double> ref = total ? r.total_order : std::optional<double>(r.first_order);
    // A zero reference has no relative error.
    if (!ref || *ref == 0.0 || r.dimension >= static_cast<std::size_t>(estimate.size())) continue;
    const double e = rel_error(estimate[static_cast<Eigen::Index>(r.dimension)], *ref);
    worst = worst ? std::max(*worst, e) : e;
  }
  return worst;
}

}  // namespace

CvSample cv_sample(const Model& model, std::size_t q, std::uint64_t seed) {
  if (q < 1) throw DomainError("cross-validation needs at least one point");
  CvSample out;
  out.points = sample(model.input_spec(), q, seed);
  out.values = model.evaluate_batch(out.points);
  return out;
}

double cv_rms(const Eigen::VectorXd& predictions, const Eigen::VectorXd& reference) {
  if (predictions.size() != reference.size() || predictions.size() == 0)
    throw DomainError("cv_rms needs two equally long, non-empty vectors");
  double sum = 0.0;
  for (Eigen::Index q = 0; q < predictions.size(); ++q) {
    const double d = predictions[q] - reference[q];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predictions.size()));
}

double cv_rms(const Surrogate& s, const CvSample& sample) { return cv_rms(eval_surrogate_batch(s, sample.points), sample.values); }

double cv_rms(const Surrogate& s, const Model& model, std::size_t q, std::uint64_t seed) {
  return cv_rms(s, cv_sample(model, q, seed));
}

double rel_error(double estimate, double reference) {
  if (reference == 0.0) throw DomainError("relative error is undefined for a zero reference");
  return std::abs((reference - estimate) / reference);
}

ReferenceStats reference_oracles(const std::string& model_name) {
  ReferenceStats out;
  out.model = model_name;
  const auto names = parameter_names(model_name);
  auto add = [&](std::size_t n, double sf, std::optional<double> st) {
    out.sobol.push_back({n, names.at(n), sf, st});
  };
  if (model_name == "ishigami") {
    // Analytic decomposition with a = 7, b = 0.1 on U(-pi, pi)^3.
    constexpr double a = 7.0, b = 0.1;
    const double pi4 = std::pow(std::numbers::pi, 4), pi8 = pi4 * pi4;
    const double v1 = b * pi4 / 5.0 + b * b * pi8 / 50.0 + 0.5;
    const double v2 = a * a / 8.0;
    const double v13 = 8.0 * b * b * pi8 / 225.0;
    const double v = v1 + v2 + v13;
    out.mean = a / 2.0;
    out.variance = v;
    out.moment_source = "analytic";
    add(0, v1 / v, (v1 + v13) / v);
    add(1, v2 / v, v2 / v);
    add(2, 0.0, v13 / v);
    out.sobol_source = "analytic";
    return out;
  }
  bool known = false;
  for (const auto& m : kQmcMoments)
    if (model_name == m.model) {
      out.mean = m.mean;
      out.variance = m.variance;
      out.moment_source = "quasi-Monte Carlo, 10^7 Sobol points";
      known = true;
    }
  if (!known) throw ConfigError("no reference statistics for model '" + model_name + "'");
  if (model_name == "borehole") {
    add(0, 0.745, 0.768);
    add(3, 0.072, 0.08);
    add(5, 0.072, 0.08);
    add(6, 0.069, 0.077);
    add(7, 0.017, 0.019);
  } else if (model_name == "steel_column") {
    add(0, 0.624, 0.624);
    add(1, 0.015, 0.015);
    add(2, 0.051, 0.052);
    add(3, 0.051, 0.052);
    add(5, 0.186, 0.188);
    add(7, 0.068, 0.07);
  } else if (model_name == "meromorphic16") {
    add(0, 0.6972, 0.7212);
    add(1, 0.2671, 0.2906);
  }
  if (!out.sobol.empty()) out.sobol_source = "published reference bars";
  return out;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Hier: return "hier";
    case Method::PceDirect: return "pce_direct";
    case Method::PceTransform: return "pce_transform";
    case Method::TdFixed: return "td_fixed";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::Hier, Method::PceDirect, Method::PceTransform, Method::TdFixed})
    if (to_string(m) == name) return m;
  throw ConfigError("unknown method '" + name + "' (expected hier, pce_direct, pce_transform or td_fixed)");
}

ExperimentConfig config_from_json(const json& j) {
  const std::string where = "experiment config";
  check_keys(j, {"model", "distributions", "method", "p_max", "budget", "tolerance", "cv_size", "seed", "output"}, where);
  ExperimentConfig cfg;
  cfg.out_dir = default_output_dir();
  if (j.contains("model")) {
    if (j.at("model").is_string()) cfg.model = j.at("model").get<std::string>();
    else cfg.external = external_from_json(j.at("model"));
  }
  if (j.contains("distributions")) cfg.distributions = product_from_json(j.at("distributions"));
  if (j.contains("method")) cfg.method = method_from_string(get_as<std::string>(j, "method", where));
  if (j.contains("p_max")) {
    if (!j.at("p_max").is_number_integer()) throw ConfigError("'p_max' must be an integer");
    cfg.p_max = j.at("p_max").get<int>();
  }
  if (j.contains("budget")) cfg.budget = get_count(j, "budget", where);
  if (j.contains("tolerance")) cfg.tolerance = get_as<double>(j, "tolerance", where);
  if (j.contains("cv_size")) cfg.cv_size = get_count(j, "cv_size", where);
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j, "seed", where);
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, {"dir", "csv", "report", "surrogate"}, "output");
    if (o.contains("dir")) cfg.out_dir = get_as<std::string>(o, "dir", "output");
    if (o.contains("csv")) cfg.csv_name = get_as<std::string>(o, "csv", "output");
    if (o.contains("report")) cfg.report_name = get_as<std::string>(o, "report", "output");
    if (o.contains("surrogate")) cfg.surrogate_name = get_as<std::string>(o, "surrogate", "output");
  }
  validate(cfg);
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.external)
    j["model"] = {{"name", cfg.external->name},
                  {"command", cfg.external->command},
                  {"pool", cfg.external->pool_size},
                  {"timeout", cfg.external->timeout_seconds}};
  else
    j["model"] = cfg.model;
  if (cfg.distributions) j["distributions"] = product_to_json(*cfg.distributions);
  j["method"] = to_string(cfg.method);
  if (cfg.method == Method::TdFixed) j["p_max"] = cfg.p_max;
  j["budget"] = cfg.budget;
  j["tolerance"] = cfg.tolerance;
  j["cv_size"] = cfg.cv_size;
  j["seed"] = cfg.seed;
  j["output"] = {{"dir", cfg.out_dir}, {"csv", cfg.csv_name}, {"report", cfg.report_name}, {"surrogate", cfg.surrogate_name}};
  return j;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.method == Method::TdFixed) {
    if (cfg.p_max < 0) throw ConfigError("p_max must be non-negative");
  } else if (cfg.budget < 2) {
    throw ConfigError("budget must be at least 2");
  }
  if (cfg.cv_size < 1) throw ConfigError("cv_size must be at least 1");
  if (!(cfg.tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");
  if (cfg.external && !cfg.distributions) throw ConfigError("an external model needs 'distributions'");
  if (!cfg.external) {
    const auto names = builtin_model_names();
    if (std::find(names.begin(), names.end(), cfg.model) == names.end())
      throw ConfigError("unknown model '" + cfg.model + "'");
    if (cfg.distributions && cfg.distributions->dim() != make_builtin_model(cfg.model)->dimension())
      throw ConfigError("model '" + cfg.model + "' takes " + std::to_string(make_builtin_model(cfg.model)->dimension()) +
                        " inputs but " + std::to_string(cfg.distributions->dim()) + " distributions were given");
  }
}

std::string default_output_dir() {
  const char* env = std::getenv(kOutDirVariable);
  return env && *env ? std::string(env) : std::string(".");
}

std::unique_ptr<Model> make_model(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.external) {
    ExternalModelSpec spec = *cfg.external;
    spec.inputs = *cfg.distributions;
    return external_model(std::move(spec));
  }
  std::shared_ptr<Model> builtin = make_builtin_model(cfg.model);
  if (!cfg.distributions) return make_builtin_model(cfg.model);
  return std::make_unique<FunctionModel>(cfg.model, *cfg.distributions,
                                         [builtin](const Eigen::Ref<const Eigen::VectorXd>& y) { return (*builtin)(y); });
}

std::vector<std::size_t> checkpoint_schedule(std::size_t budget) {
  std::vector<std::size_t> out;
  for (std::size_t b = 25; b < budget; b *= 2) out.push_back(b);
  out.push_back(budget);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Model& model,
                                const std::optional<ReferenceStats>& references) {
  validate(cfg);
  const ProductDistribution& pdist = model.input_spec();
  const std::size_t dim = pdist.dim();
  const CvSample cv = cv_sample(model, cfg.cv_size, cfg.seed);
  EvaluationCache cache(model);
  const MultiIndexSet init = MultiIndexSet::root(dim);

  auto fit = [&](std::size_t step) -> Surrogate {
    const AdaptOptions options{cfg.tolerance, step};
    switch (cfg.method) {
      case Method::Hier: return adapt_hier(model, pdist, init, options, &cache);
      case Method::PceDirect: return adapt_pce(model, pdist, init, options, &cache);
      case Method::PceTransform: return transform_to_pce(adapt_hier(model, pdist, init, options, &cache));
      case Method::TdFixed: return build_pce(model, pdist, td_set(dim, static_cast<int>(step)), &cache);
    }
    throw ContractViolation("unhandled method");
  };

  std::vector<std::size_t> steps;
  if (cfg.method == Method::TdFixed) {
    for (int p = 0; p <= cfg.p_max; ++p) steps.push_back(static_cast<std::size_t>(p));
  } else {
    // Budgets below the first frontier are not runnable; the final one is
    // always attempted so a too-small budget still reports its error.
    for (std::size_t b : checkpoint_schedule(cfg.budget))
      if (b >= dim + 1 || b == cfg.budget) steps.push_back(b);
  }

  ExperimentResult result;
  result.references = references;
  for (std::size_t step : steps) {
    Surrogate s = fit(step);
    const std::size_t evals = cache.model_calls();
    if (index_set(s).size() != evals)
      throw ContractViolation("surrogate uses " + std::to_string(index_set(s).size()) + " points but the model ran " +
                              std::to_string(evals) + " times");
    const bool fresh = result.records.empty() || evals > result.records.back().model_evaluations;
    result.surrogate = std::move(s);
    if (!fresh) continue;

    ConvergenceRecord rec;
    rec.model_evaluations = evals;
    rec.cv_rms = cv_rms(result.surrogate, cv);
    if (references) {
      const PceSurrogate p = as_pce(result.surrogate);
      if (references->mean) rec.mean_rel_err = rel_error(mean(p), *references->mean);
      const double var = variance(p);
      if (references->variance) rec.var_rel_err = rel_error(var, *references->variance);
      if (!references->sobol.empty() && var > 0.0) {
        const SensitivityReport sr = sobol_indices(p);
        rec.sobol_first_rel_err_max = sobol_error(sr.first_order, *references, false);
        rec.sobol_total_rel_err_max = sobol_error(sr.total_order, *references, true);
      }
    }
    result.records.push_back(rec);
  }

  const PceSurrogate p = as_pce(result.surrogate);
  result.report.mean = mean(p);
  result.report.variance = variance(p);
  if (result.report.variance > 0.0) result.report = sobol_indices(p);
  result.model_calls = cache.model_calls();
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto model = make_model(cfg);
  std::optional<ReferenceStats> refs;
  if (!cfg.external && !cfg.distributions) refs = reference_oracles(cfg.model);
  return run_experiment(cfg, *model, refs);
}

std::string convergence_csv(const std::vector<ConvergenceRecord>& records) {
  auto cell = [](const std::optional<double>& v) { return v ? fmt("%.12e", *v) : std::string(); };
  std::string out = "evals,cv_rms,err_mean,err_var,err_Sf_max,err_St_max\n";
  for (const auto& r : records) {
    out += std::to_string(r.model_evaluations) + "," + fmt("%.12e", r.cv_rms) + "," + cell(r.mean_rel_err) + "," +
           cell(r.var_rel_err) + "," + cell(r.sobol_first_rel_err_max) + "," + cell(r.sobol_total_rel_err_max) + "\n";
  }
  return out;
}

json sensitivity_json(const SensitivityReport& report, const std::vector<std::string>& names) {
  json j;
  j["mean"] = report.mean;
  j["variance"] = report.variance;
  json dims = json::array();
  for (Eigen::Index n = 0; n < report.first_order.size(); ++n) {
    const auto k = static_cast<std::size_t>(n);
    dims.push_back({{"dimension", k + 1},
                    {"parameter", k < names.size() ? names[k] : "Y" + std::to_string(k + 1)},
                    {"S_f", report.first_order[n]},
                    {"S_t", report.total_order[n]},
                    {"negligible", report.total_order[n] < kNegligibleSobol}});
  }
  j["sobol"] = dims;
  return j;
}

std::string sensitivity_csv(const SensitivityReport& report, const std::vector<std::string>& names) {
  std::string out = "dimension,S_f,S_t\n";
  for (Eigen::Index n = 0; n < report.first_order.size(); ++n) {
    const auto k = static_cast<std::size_t>(n);
    out += (k < names.size() ? names[k] : "Y" + std::to_string(k + 1)) + "," + fmt("%.10g", report.first_order[n]) +
           "," + fmt("%.10g", report.total_order[n]) + "\n";
  }
  return out;
}

json experiment_report(const ExperimentConfig& cfg, const ExperimentResult& result, const std::vector<std::string>& names) {
  json j;
  j["config"] = config_to_json(cfg);
  j["model_evaluations"] = result.model_calls;
  j["statistics"] = sensitivity_json(result.report, names);
  json records = json::array();
  for (const auto& r : result.records)
    records.push_back({{"evals", r.model_evaluations},
                       {"cv_rms", r.cv_rms},
                       {"err_mean", optional_number(r.mean_rel_err)},
                       {"err_var", optional_number(r.var_rel_err)},
                       {"err_Sf_max", optional_number(r.sobol_first_rel_err_max)},
                       {"err_St_max", optional_number(r.sobol_total_rel_err_max)}});
  j["records"] = records;
  if (result.references) {
    const auto& r = *result.references;
    json sobol = json::array();
    for (const auto& s : r.sobol)
      sobol.push_back({{"parameter", s.parameter}, {"S_f", s.first_order}, {"S_t", optional_number(s.total_order)}});
    j["references"] = {{"mean", optional_number(r.mean)},
                       {"variance", optional_number(r.variance)},
                       {"moment_source", r.moment_source},
                       {"sobol", sobol},
                       {"sobol_source", r.sobol_source}};
  }
  char stamp[32];
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["created"] = stamp;
  return j;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result, const std::vector<std::string>& names) {
  if (cfg.out_dir.empty()) return;
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  const fs::path dir(cfg.out_dir);
  write_text_file((dir / cfg.csv_name).string(), convergence_csv(result.records));
  write_text_file((dir / cfg.report_name).string(), experiment_report(cfg, result, names).dump(2) + "\n");
  save_surrogate((dir / cfg.surrogate_name).string(), result.surrogate);
}

std::vector<std::string> parameter_labels(const ExperimentConfig& cfg, std::size_t dim) {
  if (!cfg.external) {
    auto names = parameter_names(cfg.model);
    if (names.size() == dim) return names;
  }
  std::vector<std::string> out;
  for (std::size_t n = 1; n <= dim; ++n) out.push_back("Y" + std::to_string(n));
  return out;
}

}  // namespace lejapce
