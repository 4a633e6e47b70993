#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrs/bench.hpp"
#include "qrs/dual_bounds.hpp"
#include "qrs/io.hpp"
#include "qrs/kernels.hpp"
#include "qrs/simgen.hpp"
#include "qrs/solver.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
  double tau = 0.5;
  std::size_t grid_size = 100;
  double lambda_min_ratio = 0.01;
  std::uint64_t seed = 0;
  std::string format = "csv";
  qrs::SolveOptions solver;
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

qrs::ReportFormat report_format(const std::string& name) {
  if (name == "csv") return qrs::ReportFormat::csv;
  if (name == "json") return qrs::ReportFormat::json;
  throw std::invalid_argument("unknown format: " + name + " (expected csv or json)");
}

json effective_config(const GlobalOpts& g) {
  return json{{"tau", g.tau},
              {"grid_size", g.grid_size},
              {"lambda_min_ratio", g.lambda_min_ratio},
              {"seed", g.seed},
              {"format", g.format},
              {"tol_abs", g.solver.tol_abs},
              {"tol_rel", g.solver.tol_rel},
              {"max_iter", g.solver.max_iter},
              {"sigma", g.solver.sigma},
              {"dual_step", g.solver.dual_step},
              {"adaptive_sigma", g.solver.adaptive_sigma},
              {"rng", std::string(qrs::kRngName)},
              {"kernel_backend", std::string(qrs::kernels::name(qrs::kernels::active_backend()))}};
}

void write_config_footer(std::ofstream& out, const json& cfg) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    out << "config_" << it.key() << ",";
    if (it->is_number_float())
      out << fmt17(it->get<double>());
    else
      out << it->dump();
    out << "\n";
  }
}

double resolve_lambda(const std::optional<double>& lam,
                      const std::optional<double>& ratio, double lam_max) {
  if (lam.has_value() && ratio.has_value())
    throw std::invalid_argument("give either --lambda or --lambda-ratio, not both");
  if (lam.has_value()) return *lam;
  return ratio.value_or(1.0) * lam_max;
}

int run_simulate(const GlobalOpts& g, const qrs::SimSpec& spec,
                 const std::string& out_path, const std::string& beta_out) {
  qrs::Dataset ds;
  ds.x = qrs::gen_design(spec);
  const qrs::Vector beta = qrs::true_beta(spec.p);
  ds.y = qrs::gen_response(ds.x, beta, spec.df, spec.seed);
  qrs::save_csv(ds, out_path);
  if (!beta_out.empty()) {
    std::ofstream bo(beta_out);
    if (!bo) throw std::runtime_error("cannot write " + beta_out);
    for (double b : beta) bo << fmt17(b) << "\n";
  }
  std::cout << "wrote " << spec.n << "x" << spec.p << " dataset ("
            << qrs::covariance_name(spec.covariance) << ", seed " << spec.seed
            << ", rng " << qrs::kRngName << ") to " << out_path << "\n";
  (void)g;
  return 0;
}

int run_lambda_max(const qrs::Dataset& ds, double tau, const qrs::Vector& weights) {
  const qrs::QuantileLevel q(tau);
  const double lm = weights.empty()
                        ? qrs::lambda_max(ds.x, ds.y, q)
                        : qrs::lambda_max_weighted(ds.x, ds.y, q, weights);
  std::cout << fmt17(lm) << "\n";
  return 0;
}

int run_screen(const GlobalOpts& g, const qrs::Dataset& ds,
               const std::optional<double>& lam_opt,
               const std::optional<double>& ratio_opt, const qrs::Vector& weights,
               const std::string& out_path) {
  const qrs::QuantileLevel q(g.tau);
  qrs::ScreeningContext ctx(ds.x, ds.y, q, weights);
  const double lam = resolve_lambda(lam_opt, ratio_opt, ctx.lambda_max());
  const qrs::ScreeningReport report = ctx.report_at(lam);

  std::cout << "lambda " << fmt17(lam) << " (lambda_max " << fmt17(report.lambda_max_used)
            << "): eliminated " << report.eliminated.size() << " of " << ds.x.cols()
            << " features";
  if (!report.eliminated.empty()) {
    std::cout << ":";
    for (std::size_t j : report.eliminated) std::cout << " " << ds.feature_name(j);
  }
  std::cout << "\n";

  if (out_path.empty()) return 0;
  const json cfg = effective_config(g);
  if (report_format(g.format) == qrs::ReportFormat::csv) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "feature,p_plus,p_minus,d_plus,d_minus,eliminated\n";
    std::vector<bool> elim(ds.x.cols(), false);
    for (std::size_t j : report.eliminated) elim[j] = true;
    for (std::size_t j = 0; j < ds.x.cols(); ++j) {
      const qrs::FeatureBound& fb = report.bounds[j];
      out << ds.feature_name(j) << "," << fmt17(fb.p_plus) << "," << fmt17(fb.p_minus)
          << "," << fmt17(fb.d_plus) << "," << fmt17(fb.d_minus) << ","
          << (elim[j] ? 1 : 0) << "\n";
    }
    out << "lambda," << fmt17(lam) << "\n";
    out << "lambda_max," << fmt17(report.lambda_max_used) << "\n";
    write_config_footer(out, cfg);
  } else {
    json bounds = json::array();
    for (std::size_t j = 0; j < ds.x.cols(); ++j) {
      const qrs::FeatureBound& fb = report.bounds[j];
      bounds.push_back(json{{"feature", ds.feature_name(j)},
                            {"p_plus", fb.p_plus},
                            {"p_minus", fb.p_minus},
                            {"d_plus", fb.d_plus},
                            {"d_minus", fb.d_minus}});
    }
    json elim = json::array();
    for (std::size_t j : report.eliminated) elim.push_back(j + 1);
    json doc{{"lambda", lam},
             {"lambda_max", report.lambda_max_used},
             {"eliminated", elim},
             {"bounds", bounds},
             {"metadata", cfg}};
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << doc.dump(2) << "\n";
  }
  std::cout << "wrote screening report to " << out_path << "\n";
  return 0;
}

int run_fit(const GlobalOpts& g, const qrs::Dataset& ds, bool screening,
            const qrs::Vector& weights, const std::string& out_path) {
  const qrs::QuantileLevel q(g.tau);
  const qrs::Vector ratios = qrs::ratio_grid(g.grid_size, g.lambda_min_ratio);
  const qrs::PathResult path =
      qrs::solve_path(ds.x, ds.y, q, ratios, screening, g.solver, weights);

  std::size_t n_converged = 0;
  for (bool c : path.converged) n_converged += c ? 1 : 0;
  std::cout << "path of " << path.lambdas.size() << " lambdas (lambda_max "
            << fmt17(path.lambda_max) << "), " << n_converged << " converged, screening "
            << (screening ? "on" : "off") << "\n";

  if (out_path.empty()) return 0;
  const json cfg = effective_config(g);
  if (report_format(g.format) == qrs::ReportFormat::csv) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "lambda_ratio,lambda,nnz,n_eliminated,kkt_residual,solve_seconds,converged\n";
    for (std::size_t k = 0; k < path.lambdas.size(); ++k) {
      std::size_t nnz = 0;
      for (double b : path.betas[k]) nnz += b != 0.0 ? 1 : 0;
      out << fmt17(path.lambdas[k] / path.lambda_max) << "," << fmt17(path.lambdas[k])
          << "," << nnz << "," << path.eliminated[k].size() << ","
          << fmt17(path.kkt_residuals[k]) << "," << fmt17(path.solve_times[k]) << ","
          << (path.converged[k] ? 1 : 0) << "\n";
    }
    out << "lambda_max," << fmt17(path.lambda_max) << "\n";
    write_config_footer(out, cfg);
  } else {
    json names = json::array();
    for (std::size_t j = 0; j < ds.x.cols(); ++j) names.push_back(ds.feature_name(j));
    json entries = json::array();
    for (std::size_t k = 0; k < path.lambdas.size(); ++k) {
      json elim = json::array();
      for (std::size_t j : path.eliminated[k]) elim.push_back(j + 1);
      entries.push_back(json{{"lambda", path.lambdas[k]},
                             {"lambda_ratio", path.lambdas[k] / path.lambda_max},
                             {"beta", path.betas[k]},
                             {"eliminated", elim},
                             {"kkt_residual", path.kkt_residuals[k]},
                             {"solve_seconds", path.solve_times[k]},
                             {"converged", static_cast<bool>(path.converged[k])}});
    }
    json doc{{"lambda_max", path.lambda_max},
             {"screening", screening},
             {"feature_names", names},
             {"path", entries},
             {"metadata", cfg}};
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << doc.dump(2) << "\n";
  }
  std::cout << "wrote path report to " << out_path << "\n";
  return 0;
}

int run_bench(const GlobalOpts& g, const qrs::Dataset& ds, qrs::BenchMetadata meta,
              const std::string& out_path) {
  const qrs::QuantileLevel q(g.tau);
  const qrs::Vector ratios = qrs::ratio_grid(g.grid_size, g.lambda_min_ratio);
  meta.lambda_min_ratio = g.lambda_min_ratio;
  const qrs::BenchReport report =
      qrs::measure_speedup(ds.x, ds.y, q, ratios, g.solver, meta);

  std::cout << "t_full " << fmt17(report.totals.t_full_seconds) << "s, t_screened "
            << fmt17(report.totals.t_screened_seconds) << "s, speedup "
            << fmt17(report.totals.speedup) << (report.tainted ? " (tainted)" : "")
            << "\n";
  if (!out_path.empty()) {
    qrs::emit_report(report, out_path, report_format(g.format));
    std::cout << "wrote benchmark report to " << out_path << "\n";
  }
  return report.tainted ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l1-norm quantile regression with safe feature screening"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--tau", g.tau, "quantile level in (0,1)")->capture_default_str();
  app.add_option("--grid-size", g.grid_size, "number of lambda ratios on the path")
      ->capture_default_str();
  app.add_option("--lambda-min-ratio", g.lambda_min_ratio,
                 "smallest lambda/lambda_max on the path")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--format", g.format, "report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--tol-abs", g.solver.tol_abs, "solver absolute tolerance")
      ->capture_default_str();
  app.add_option("--tol-rel", g.solver.tol_rel, "solver relative tolerance")
      ->capture_default_str();
  app.add_option("--max-iter", g.solver.max_iter, "solver iteration cap")
      ->capture_default_str();
  app.add_option("--sigma", g.solver.sigma, "ADMM penalty parameter")
      ->capture_default_str();
  app.add_option("--dual-step", g.solver.dual_step, "ADMM dual step length")
      ->capture_default_str();
  app.add_flag("--adaptive-sigma", g.solver.adaptive_sigma,
               "rescale sigma on residual imbalance");
  std::string kernel_backend;
  app.add_option("--kernels", kernel_backend, "force kernel backend: scalar or avx2")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  std::size_t sim_n = 100, sim_p = 2000;
  std::string sim_cov = "identity", sim_out, sim_beta_out;
  unsigned sim_df = 4;
  sim->add_option("--n", sim_n, "samples")->capture_default_str();
  sim->add_option("--p", sim_p, "features")->capture_default_str();
  sim->add_option("--covariance", sim_cov, "identity or ar1_half")
      ->check(CLI::IsMember({"identity", "ar1_half", "ar1"}))
      ->capture_default_str();
  sim->add_option("--df", sim_df, "t-noise degrees of freedom")->capture_default_str();
  sim->add_option("--out", sim_out, "output CSV path")->required();
  sim->add_option("--beta-out", sim_beta_out, "write the true coefficients here");

  // dataset-consuming subcommands share these
  std::string data_path, response = "y", weights_path;
  bool libsvm = false;
  auto add_data_opts = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--data", data_path, "dataset file");
    if (required) opt->required();
    cmd->add_option("--response", response, "response column (name or 1-based index)")
        ->capture_default_str();
    cmd->add_flag("--libsvm", libsvm, "dataset file is in LIBSVM format");
    cmd->add_option("--weights", weights_path, "per-feature positive weights file");
  };

  auto* lmax = app.add_subcommand("lambda-max", "print the smallest all-zero penalty");
  add_data_opts(lmax, true);

  auto* scr = app.add_subcommand("screen", "screen features at one lambda");
  add_data_opts(scr, true);
  std::optional<double> scr_lambda, scr_ratio;
  std::string scr_out;
  scr->add_option("--lambda", scr_lambda, "absolute penalty value");
  scr->add_option("--lambda-ratio", scr_ratio, "penalty as a fraction of lambda_max");
  scr->add_option("--out", scr_out, "report path");

  auto* fit = app.add_subcommand("fit", "solve the full regularization path");
  add_data_opts(fit, true);
  std::string fit_screen = "on", fit_out;
  fit->add_option("--screen", fit_screen, "on or off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  fit->add_option("--out", fit_out, "report path");

  auto* bench = app.add_subcommand("bench", "rejection-ratio and speedup protocol");
  add_data_opts(bench, false);
  std::size_t bench_n = 100, bench_p = 2000;
  std::string bench_cov = "identity", bench_out;
  unsigned bench_df = 4;
  bench->add_option("--n", bench_n, "samples (simulated mode)")->capture_default_str();
  bench->add_option("--p", bench_p, "features (simulated mode)")->capture_default_str();
  bench->add_option("--covariance", bench_cov, "identity or ar1_half")
      ->check(CLI::IsMember({"identity", "ar1_half", "ar1"}))
      ->capture_default_str();
  bench->add_option("--df", bench_df, "t-noise degrees of freedom")
      ->capture_default_str();
  bench->add_option("--out", bench_out, "report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!kernel_backend.empty())
      qrs::kernels::set_backend(kernel_backend == "avx2" ? qrs::kernels::Backend::avx2
                                                         : qrs::kernels::Backend::scalar);

    auto load_dataset = [&]() {
      return libsvm ? qrs::load_libsvm(data_path) : qrs::load_csv(data_path, response);
    };
    auto load_wts = [&]() {
      return weights_path.empty() ? qrs::Vector{} : qrs::load_weights(weights_path);
    };

    if (sim->parsed()) {
      qrs::SimSpec spec{sim_n, sim_p, qrs::covariance_from_name(sim_cov), g.seed, sim_df};
      return run_simulate(g, spec, sim_out, sim_beta_out);
    }
    if (lmax->parsed()) return run_lambda_max(load_dataset(), g.tau, load_wts());
    if (scr->parsed())
      return run_screen(g, load_dataset(), scr_lambda, scr_ratio, load_wts(), scr_out);
    if (fit->parsed())
      return run_fit(g, load_dataset(), fit_screen == "on", load_wts(), fit_out);
    if (bench->parsed()) {
      qrs::BenchMetadata meta;
      meta.seed = g.seed;
      qrs::Dataset ds;
      if (!data_path.empty()) {
        ds = load_dataset();
        meta.covariance = "none";
      } else {
        qrs::SimSpec spec{bench_n, bench_p, qrs::covariance_from_name(bench_cov), g.seed,
                          bench_df};
        ds.x = qrs::gen_design(spec);
        ds.y = qrs::gen_response(ds.x, qrs::true_beta(spec.p), spec.df, spec.seed);
        meta.covariance = std::string(qrs::covariance_name(spec.covariance));
      }
      return run_bench(g, ds, meta, bench_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
