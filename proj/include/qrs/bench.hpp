#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrs/matrix.hpp"
#include "qrs/quantile.hpp"
#include "qrs/solver.hpp"

namespace qrs {

struct BenchRow {
  double lambda_ratio = 0.0;
  std::size_t n_screened = 0;
  std::size_t n_zero = 0;
  double rejection_ratio = 0.0;
};

struct BenchTotals {
  double t_full_seconds = 0.0;
  double t_screened_seconds = 0.0;
  double speedup = 0.0;
};

struct BenchMetadata {
  double tau = 0.5;
  std::size_t n = 0;
  std::size_t p = 0;
  std::uint64_t seed = 0;
  std::string covariance = "none";
  std::size_t grid_size = 0;
  double lambda_min_ratio = 0.01;
  SolveOptions solver;
  std::string rng = "splitmix64";
  double zero_tol = 1e-7;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // largest lambda ratio first
  BenchTotals totals;
  BenchMetadata metadata;
  bool tainted = false;  // a solve failed to converge
};

// grid_size ratios equally spaced on [min_ratio, 1], ascending.
Vector ratio_grid(std::size_t grid_size, double min_ratio);

// |screened| / |zero_set| in [0, 1]; 1.0 when both are empty. Throws
// std::runtime_error("safety violation...") unless screened is a subset
// of zero_set; both inputs must be sorted.
double rejection_ratio(const std::vector<std::size_t>& screened,
                       const std::vector<std::size_t>& zero_set);

// Two identically configured warm-started path runs (screening off, then
// on) after one untimed warmup solve. The screening-off coefficients,
// thresholded at metadata.zero_tol, define the per-lambda zero sets.
BenchReport measure_speedup(const Matrix& x, std::span<const double> y,
                            QuantileLevel tau, std::span<const double> ratios,
                            const SolveOptions& opts, BenchMetadata metadata);

enum class ReportFormat { csv, json };

void emit_report(const BenchReport& report, const std::string& path, ReportFormat fmt);
BenchReport parse_report(const std::string& path, ReportFormat fmt);

}  // namespace qrs
