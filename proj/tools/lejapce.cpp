// Command line front end: fit, eval, analyze, cv, leja, benchmark.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lejapce/errors.hpp"
#include "lejapce/harness.hpp"
#include "lejapce/leja.hpp"
#include "lejapce/postprocess.hpp"
#include "lejapce/surrogate.hpp"

using namespace lejapce;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kModel = 3, kNumerical = 4 };

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

// Rows of comma- or whitespace-separated numbers; a non-numeric first line
// is taken as a header.
Eigen::MatrixXd read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream words(line);
    std::vector<double> row;
    std::string w;
    bool numeric = true;
    while (words >> w) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(w, &used));
        if (used != w.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (line_no == 1 && rows.empty()) continue;
      throw ConfigError("'" + path + "' line " + std::to_string(line_no) + " is not numeric");
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("'" + path + "' line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                        " columns, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("'" + path + "' holds no points");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t q = 0; q < rows.size(); ++q)
    for (std::size_t n = 0; n < rows[q].size(); ++n)
      out(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(n)) = rows[q][n];
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

std::vector<std::string> labels_for(const std::string& model, std::size_t dim) {
  ExperimentConfig cfg;
  cfg.model = model;
  return parameter_labels(cfg, dim);
}

void print_summary(const ExperimentConfig& cfg, const ExperimentResult& result) {
  std::printf("model evaluations: %zu\n", result.model_calls);
  if (!result.records.empty()) std::printf("cv_rms: %.6e\n", result.records.back().cv_rms);
  std::printf("mean: %.10g\nvariance: %.10g\n", result.report.mean, result.report.variance);
  if (!cfg.out_dir.empty()) std::printf("outputs written to %s\n", cfg.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Leja interpolation and polynomial chaos surrogates"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "build a surrogate and its convergence record");
  std::string config_path, model_name, method_name;
  std::size_t budget = 0, cv_size = 0;
  int p_max = -1;
  double tolerance = -1.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  fit->add_option("--config", config_path, "experiment config (JSON)");
  fit->add_option("--model", model_name, "built-in model name");
  fit->add_option("--method", method_name, "hier, pce_direct, pce_transform or td_fixed");
  fit->add_option("--budget", budget, "evaluation budget B");
  fit->add_option("--tol", tolerance, "tolerance");
  fit->add_option("--pmax", p_max, "total degree for td_fixed");
  fit->add_option("--cv-size,-Q", cv_size, "cross-validation points");
  fit->add_option("--seed", seed, "seed of the cross-validation sample");
  fit->add_option("--out", out_dir, "output directory (default $LEJAPCE_OUT_DIR or .)");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a saved surrogate");
  std::string surrogate_path, points_path, output_path;
  eval->add_option("--surrogate", surrogate_path, "surrogate JSON")->required();
  eval->add_option("--points", points_path, "CSV of points, one per row")->required();
  eval->add_option("--output", output_path, "output file (default stdout)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "moments and Sobol indices of a surrogate");
  std::string analyze_model;
  analyze->add_option("--surrogate", surrogate_path, "surrogate JSON")->required();
  analyze->add_option("--model", analyze_model, "built-in model, for parameter names");
  analyze->add_option("--out", out_dir, "directory for sobol.json and sobol.csv");

  // cv
  auto* cv = app.add_subcommand("cv", "cross-validation error of a surrogate");
  std::size_t cv_q = 10000;
  std::uint64_t cv_seed = 1;
  cv->add_option("--surrogate", surrogate_path, "surrogate JSON")->required();
  cv->add_option("--model", model_name, "built-in model name");
  cv->add_option("--config", config_path, "experiment config naming the model");
  cv->add_option("-Q", cv_q, "number of points");
  cv->add_option("--seed", cv_seed, "sample seed");

  // leja
  auto* leja = app.add_subcommand("leja", "print Leja nodes as CSV");
  std::string dist_spec;
  std::size_t count = 10;
  leja->add_option("--dist", dist_spec, "e.g. normal:0,1 or {\"kind\":\"uniform\",\"lo\":-1,\"hi\":1}")->required();
  leja->add_option("-n", count, "number of nodes");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "run all adaptive methods on a built-in model");
  bool full = false;
  bench->add_option("--model", model_name, "built-in model name")->required();
  bench->add_flag("--full", full, "budget 1500 and 10^5 CV points instead of 200 and 10^4");
  bench->add_option("--out", out_dir, "output directory (default $LEJAPCE_OUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*fit) {
      ExperimentConfig cfg;
      cfg.out_dir = default_output_dir();
      if (!config_path.empty()) cfg = config_from_json(read_json_file(config_path));
      if (!model_name.empty()) {
        cfg.model = model_name;
        cfg.external.reset();
      }
      if (!method_name.empty()) cfg.method = method_from_string(method_name);
      if (budget) cfg.budget = budget;
      if (tolerance >= 0.0) cfg.tolerance = tolerance;
      else if (fit->count("--tol")) throw ConfigError("tolerance must be non-negative");
      if (p_max >= 0) cfg.p_max = p_max;
      if (cv_size) cfg.cv_size = cv_size;
      if (fit->count("--seed")) cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      validate(cfg);
      const ExperimentResult result = run_experiment(cfg);
      write_outputs(cfg, result, parameter_labels(cfg, input_distribution(result.surrogate).dim()));
      print_summary(cfg, result);
    } else if (*eval) {
      const Surrogate s = load_surrogate(surrogate_path);
      const Eigen::MatrixXd points = read_points(points_path);
      if (static_cast<std::size_t>(points.cols()) != input_distribution(s).dim())
        throw ConfigError("points have " + std::to_string(points.cols()) + " columns but the surrogate takes " +
                          std::to_string(input_distribution(s).dim()) + " inputs");
      const Eigen::VectorXd values = eval_surrogate_batch(s, points);
      std::string text;
      for (Eigen::Index q = 0; q < values.size(); ++q) text += g17(values[q]) + "\n";
      emit(output_path, text);
    } else if (*analyze) {
      const Surrogate s = load_surrogate(surrogate_path);
      const PceSurrogate p = as_pce(s);
      const SensitivityReport report = sobol_indices(p);
      const auto names = labels_for(analyze_model, p.pdist.dim());
      const std::string json_text = sensitivity_json(report, names).dump(2) + "\n";
      std::cout << json_text;
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_text_file((std::filesystem::path(out_dir) / "sobol.json").string(), json_text);
        write_text_file((std::filesystem::path(out_dir) / "sobol.csv").string(), sensitivity_csv(report, names));
      }
    } else if (*cv) {
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = config_from_json(read_json_file(config_path));
      if (!model_name.empty()) {
        cfg.model = model_name;
        cfg.external.reset();
      } else if (config_path.empty()) {
        throw ConfigError("cv needs --model or --config");
      }
      const auto model = make_model(cfg);
      const Surrogate s = load_surrogate(surrogate_path);
      if (model->dimension() != input_distribution(s).dim())
        throw ConfigError("model and surrogate dimensions differ");
      std::printf("%.10e\n", cv_rms(s, *model, cv_q, cv_seed));
    } else if (*leja) {
      const auto nodes = cached_leja_nodes(distribution_from_string(dist_spec), count);
      std::string text;
      for (double y : nodes) text += g17(y) + "\n";
      std::cout << text;
    } else if (*bench) {
      const std::string root = out_dir.empty() ? default_output_dir() : out_dir;
      std::printf("%-14s %8s %14s %12s %12s\n", "method", "evals", "cv_rms", "err_mean", "err_var");
      for (Method m : {Method::Hier, Method::PceDirect, Method::PceTransform}) {
        ExperimentConfig cfg;
        cfg.model = model_name;
        cfg.method = m;
        cfg.budget = full ? 1500 : 200;
        cfg.cv_size = full ? 100000 : 10000;
        cfg.out_dir = (std::filesystem::path(root) / (model_name + "_" + to_string(m))).string();
        cfg.csv_name = "convergence.csv";
        const ExperimentResult result = run_experiment(cfg);
        write_outputs(cfg, result, parameter_labels(cfg, input_distribution(result.surrogate).dim()));
        const auto& last = result.records.back();
        std::printf("%-14s %8zu %14.6e %12.3e %12.3e\n", to_string(m).c_str(), last.model_evaluations, last.cv_rms,
                    last.mean_rel_err.value_or(NAN), last.var_rel_err.value_or(NAN));
      }
      std::printf("outputs written under %s\n", root.c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return kModel;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
