#include "qrs/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qrs {

namespace {

using nlohmann::json;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// locale-independent numeric parsing for the CSV reader
template <typename T>
bool parse_num(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

template <typename T>
T need_num(const std::string& path, const std::string& key, const std::string& s) {
  T v{};
  if (!parse_num(s, v))
    throw std::runtime_error(path + ": bad value for " + key + ": '" + s + "'");
  return v;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json solver_to_json(const SolveOptions& s) {
  return json{{"tol_abs", s.tol_abs},     {"tol_rel", s.tol_rel},
              {"max_iter", s.max_iter},   {"sigma", s.sigma},
              {"dual_step", s.dual_step}, {"adaptive_sigma", s.adaptive_sigma}};
}

SolveOptions solver_from_json(const json& j) {
  SolveOptions s;
  s.tol_abs = j.at("tol_abs").get<double>();
  s.tol_rel = j.at("tol_rel").get<double>();
  s.max_iter = j.at("max_iter").get<std::size_t>();
  s.sigma = j.at("sigma").get<double>();
  s.dual_step = j.at("dual_step").get<double>();
  s.adaptive_sigma = j.at("adaptive_sigma").get<bool>();
  return s;
}

}  // namespace

Vector ratio_grid(std::size_t grid_size, double min_ratio) {
  if (grid_size == 0) return {};
  if (!(min_ratio > 0.0) || min_ratio > 1.0)
    throw std::invalid_argument("lambda-min ratio must lie in (0, 1]");
  if (grid_size == 1) return {1.0};
  Vector grid(grid_size);
  const double step = (1.0 - min_ratio) / static_cast<double>(grid_size - 1);
  for (std::size_t k = 0; k < grid_size; ++k)
    grid[k] = min_ratio + step * static_cast<double>(k);
  grid.back() = 1.0;
  return grid;
}

double rejection_ratio(const std::vector<std::size_t>& screened,
                       const std::vector<std::size_t>& zero_set) {
  if (!std::includes(zero_set.begin(), zero_set.end(), screened.begin(),
                     screened.end())) {
    std::vector<std::size_t> offending;
    std::set_difference(screened.begin(), screened.end(), zero_set.begin(),
                        zero_set.end(), std::back_inserter(offending));
    std::string msg = "safety violation: screened features with nonzero coefficients:";
    for (std::size_t j : offending) msg += " " + std::to_string(j + 1);
    throw std::runtime_error(msg);
  }
  if (zero_set.empty()) return 1.0;
  return static_cast<double>(screened.size()) / static_cast<double>(zero_set.size());
}

BenchReport measure_speedup(const Matrix& x, std::span<const double> y,
                            QuantileLevel tau, std::span<const double> ratios,
                            const SolveOptions& opts, BenchMetadata metadata) {
  BenchReport report;
  metadata.n = x.rows();
  metadata.p = x.cols();
  metadata.tau = tau.value();
  metadata.grid_size = ratios.size();
  metadata.solver = opts;
  report.metadata = metadata;
  if (ratios.empty()) return report;

  // Untimed warmup at the top of the path.
  {
    Vector top = {ratios.back()};
    solve_path(x, y, tau, top, false, opts);
  }

  double t0 = now_seconds();
  PathResult full = solve_path(x, y, tau, ratios, false, opts);
  double t1 = now_seconds();
  PathResult screened = solve_path(x, y, tau, ratios, true, opts);
  double t2 = now_seconds();

  report.totals.t_full_seconds = t1 - t0;
  report.totals.t_screened_seconds = t2 - t1;
  report.totals.speedup = report.totals.t_full_seconds / report.totals.t_screened_seconds;

  for (std::size_t k = 0; k < full.lambdas.size(); ++k) {
    if (!full.converged[k] || !screened.converged[k]) report.tainted = true;
    std::vector<std::size_t> zero_set;
    for (std::size_t j = 0; j < full.betas[k].size(); ++j)
      if (std::fabs(full.betas[k][j]) <= metadata.zero_tol) zero_set.push_back(j);
    BenchRow row;
    row.lambda_ratio = full.lambdas[k] / full.lambda_max;
    row.n_screened = screened.eliminated[k].size();
    row.n_zero = zero_set.size();
    row.rejection_ratio = rejection_ratio(screened.eliminated[k], zero_set);
    report.rows.push_back(row);
  }
  return report;
}

void emit_report(const BenchReport& report, const std::string& path, ReportFormat fmt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const BenchMetadata& m = report.metadata;

  if (fmt == ReportFormat::csv) {
    out << "lambda_ratio,n_screened,n_zero,rejection_ratio\n";
    for (const BenchRow& r : report.rows)
      out << fmt17(r.lambda_ratio) << "," << r.n_screened << "," << r.n_zero << ","
          << fmt17(r.rejection_ratio) << "\n";
    out << "t_full_seconds," << fmt17(report.totals.t_full_seconds) << "\n";
    out << "t_screened_seconds," << fmt17(report.totals.t_screened_seconds) << "\n";
    out << "speedup," << fmt17(report.totals.speedup) << "\n";
    out << "tainted," << (report.tainted ? 1 : 0) << "\n";
    out << "meta_tau," << fmt17(m.tau) << "\n";
    out << "meta_n," << m.n << "\n";
    out << "meta_p," << m.p << "\n";
    out << "meta_seed," << m.seed << "\n";
    out << "meta_covariance," << m.covariance << "\n";
    out << "meta_grid_size," << m.grid_size << "\n";
    out << "meta_lambda_min_ratio," << fmt17(m.lambda_min_ratio) << "\n";
    out << "meta_tol_abs," << fmt17(m.solver.tol_abs) << "\n";
    out << "meta_tol_rel," << fmt17(m.solver.tol_rel) << "\n";
    out << "meta_max_iter," << m.solver.max_iter << "\n";
    out << "meta_sigma," << fmt17(m.solver.sigma) << "\n";
    out << "meta_dual_step," << fmt17(m.solver.dual_step) << "\n";
    out << "meta_adaptive_sigma," << (m.solver.adaptive_sigma ? 1 : 0) << "\n";
    out << "meta_zero_tol," << fmt17(m.zero_tol) << "\n";
    out << "meta_rng," << m.rng << "\n";
  } else {
    json rows = json::array();
    for (const BenchRow& r : report.rows)
      rows.push_back(json{{"lambda_ratio", r.lambda_ratio},
                          {"n_screened", r.n_screened},
                          {"n_zero", r.n_zero},
                          {"rejection_ratio", r.rejection_ratio}});
    json doc{
        {"rows", rows},
        {"totals",
         json{{"t_full_seconds", report.totals.t_full_seconds},
              {"t_screened_seconds", report.totals.t_screened_seconds},
              {"speedup", report.totals.speedup}}},
        {"metadata",
         json{{"tau", m.tau},
              {"n", m.n},
              {"p", m.p},
              {"seed", m.seed},
              {"covariance", m.covariance},
              {"grid_size", m.grid_size},
              {"lambda_min_ratio", m.lambda_min_ratio},
              {"solver", solver_to_json(m.solver)},
              {"rng", m.rng},
              {"zero_tol", m.zero_tol}}},
        {"tainted", report.tainted}};
    out << doc.dump(2) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

BenchReport parse_report(const std::string& path, ReportFormat fmt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  BenchReport report;

  if (fmt == ReportFormat::json) {
    json doc = json::parse(in);
    for (const json& r : doc.at("rows")) {
      BenchRow row;
      row.lambda_ratio = r.at("lambda_ratio").get<double>();
      row.n_screened = r.at("n_screened").get<std::size_t>();
      row.n_zero = r.at("n_zero").get<std::size_t>();
      row.rejection_ratio = r.at("rejection_ratio").get<double>();
      report.rows.push_back(row);
    }
    const json& t = doc.at("totals");
    report.totals.t_full_seconds = t.at("t_full_seconds").get<double>();
    report.totals.t_screened_seconds = t.at("t_screened_seconds").get<double>();
    report.totals.speedup = t.at("speedup").get<double>();
    const json& m = doc.at("metadata");
    report.metadata.tau = m.at("tau").get<double>();
    report.metadata.n = m.at("n").get<std::size_t>();
    report.metadata.p = m.at("p").get<std::size_t>();
    report.metadata.seed = m.at("seed").get<std::uint64_t>();
    report.metadata.covariance = m.at("covariance").get<std::string>();
    report.metadata.grid_size = m.at("grid_size").get<std::size_t>();
    report.metadata.lambda_min_ratio = m.at("lambda_min_ratio").get<double>();
    report.metadata.solver = solver_from_json(m.at("solver"));
    report.metadata.rng = m.at("rng").get<std::string>();
    report.metadata.zero_tol = m.at("zero_tol").get<double>();
    report.tainted = doc.at("tainted").get<bool>();
    return report;
  }

  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "lambda_ratio,n_screened,n_zero,rejection_ratio")
        throw std::runtime_error(path + ": unexpected CSV header: " + line);
      saw_header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string key;
    std::getline(ss, key, ',');
    std::string rest;
    std::getline(ss, rest);
    double ratio;
    if (parse_num(key, ratio)) {
      std::istringstream rs(rest);
      BenchRow row;
      row.lambda_ratio = ratio;
      std::string cell;
      std::getline(rs, cell, ',');
      row.n_screened = need_num<std::size_t>(path, "n_screened", cell);
      std::getline(rs, cell, ',');
      row.n_zero = need_num<std::size_t>(path, "n_zero", cell);
      std::getline(rs, cell, ',');
      row.rejection_ratio = need_num<double>(path, "rejection_ratio", cell);
      report.rows.push_back(row);
    } else if (key == "t_full_seconds") {
      report.totals.t_full_seconds = need_num<double>(path, key, rest);
    } else if (key == "t_screened_seconds") {
      report.totals.t_screened_seconds = need_num<double>(path, key, rest);
    } else if (key == "speedup") {
      report.totals.speedup = need_num<double>(path, key, rest);
    } else if (key == "tainted") {
      report.tainted = rest == "1";
    } else if (key == "meta_tau") {
      report.metadata.tau = need_num<double>(path, key, rest);
    } else if (key == "meta_n") {
      report.metadata.n = need_num<std::size_t>(path, key, rest);
    } else if (key == "meta_p") {
      report.metadata.p = need_num<std::size_t>(path, key, rest);
    } else if (key == "meta_seed") {
      report.metadata.seed = need_num<std::uint64_t>(path, key, rest);
    } else if (key == "meta_covariance") {
      report.metadata.covariance = rest;
    } else if (key == "meta_grid_size") {
      report.metadata.grid_size = need_num<std::size_t>(path, key, rest);
    } else if (key == "meta_lambda_min_ratio") {
      report.metadata.lambda_min_ratio = need_num<double>(path, key, rest);
    } else if (key == "meta_tol_abs") {
      report.metadata.solver.tol_abs = need_num<double>(path, key, rest);
    } else if (key == "meta_tol_rel") {
      report.metadata.solver.tol_rel = need_num<double>(path, key, rest);
    } else if (key == "meta_max_iter") {
      report.metadata.solver.max_iter = need_num<std::size_t>(path, key, rest);
    } else if (key == "meta_sigma") {
      report.metadata.solver.sigma = need_num<double>(path, key, rest);
    } else if (key == "meta_dual_step") {
      report.metadata.solver.dual_step = need_num<double>(path, key, rest);
    } else if (key == "meta_adaptive_sigma") {
      report.metadata.solver.adaptive_sigma = rest == "1";
    } else if (key == "meta_zero_tol") {
      report.metadata.zero_tol = need_num<double>(path, key, rest);
    } else if (key == "meta_rng") {
      report.metadata.rng = rest;
    } else {
      throw std::runtime_error(path + ": unexpected CSV line: " + line);
    }
  }
  if (!saw_header) throw std::runtime_error(path + ": missing CSV header");
  return report;
}

}  // namespace qrs
