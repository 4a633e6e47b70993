#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qrs/matrix.hpp"
#include "qrs/quantile.hpp"

namespace qrs {

// Indices of {y_i > 0}, {y_i < 0} and {y_i = 0}.
struct SignPartition {
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
  std::vector<std::size_t> zero;
};

SignPartition sign_partition(std::span<const double> y);

// Per-feature bound on |X_.j^T theta| over the dual box; its max norm is
// the smallest penalty at which the zero vector is optimal.
Vector compute_delta(const Matrix& x, std::span<const double> y, QuantileLevel tau);

double lambda_max(const Matrix& x, std::span<const double> y, QuantileLevel tau);

// Weighted variant: ||delta||_inf / min_j w_j, all weights > 0.
double lambda_max_weighted(const Matrix& x, std::span<const double> y,
                           QuantileLevel tau, std::span<const double> weights);

// Estimate of the dual solution in the shifted variable
// theta_tilde_i = theta_i - (tau - 1/2): the intersection of the slab
// b2 <= <theta_tilde, y> <= b1 with the ball of radius rho = sqrt(n)/2
// circumscribing the dual box.
struct DualRegion {
  double rho = 0.0;     // sqrt(n) / 2
  double b1 = 0.0;      // upper slab bound
  double b2 = 0.0;      // lower slab bound
  double shift = 0.0;   // tau - 1/2
  double y_norm = 0.0;  // ||y||_2
};

DualRegion dual_region(std::span<const double> y, QuantileLevel tau, double lam,
                       double lam_max);

// Exact max of <c, theta_tilde> over the slab-ball region. Throws
// std::invalid_argument("empty dual region") when b1/b2/rho are
// inconsistent. ||c|| = 0 returns 0.
double slab_ball_max(std::span<const double> c, std::span<const double> y,
                     const DualRegion& region);

// Same maximum from the column summaries alone; the optimum depends on c
// only through ||c||^2 and <c, y>.
double slab_ball_max_core(double c_norm_sq, double c_dot_y, double y_norm_sq,
                          const DualRegion& region);

// Literal transcription of the published distance case table, kept for
// cross-checking the exact maximizer. Returns nullopt where the printed
// conditions select no row or contradict each other (only the b1 >= 0
// rows are consistent as printed).
std::optional<double> case_table_distance(double cos_gamma, const DualRegion& region);

// Screening certificate for one feature: p_plus/p_minus bound
// +-X_.j^T theta* over the relaxed dual region.
struct FeatureBound {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double d_plus = 0.0;
  double d_minus = 0.0;
  double cos_gamma_plus = 0.0;
  double cos_gamma_minus = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
};

std::vector<FeatureBound> feature_bounds(const Matrix& x, std::span<const double> y,
                                         QuantileLevel tau, double lam,
                                         double lam_max);

struct ScreeningReport {
  double lambda = 0.0;
  double lambda_max_used = 0.0;
  std::vector<std::size_t> eliminated;  // sorted, 0-based
  std::vector<FeatureBound> bounds;
};

// Precomputed per-dataset screening state. Everything except the lower
// slab bound is independent of lambda, so a path run screens each lambda
// in O(p) after one O(n p) pass.
class ScreeningContext {
 public:
  ScreeningContext(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                   std::span<const double> weights = {});

  double lambda_max() const { return lam_max_; }
  const Vector& delta() const { return delta_; }

  // Indices eliminated at lam; user_tol >= 0 only shrinks the set.
  std::vector<std::size_t> eliminate_at(double lam, double user_tol = 0.0) const;

  ScreeningReport report_at(double lam, double user_tol = 0.0) const;

 private:
  DualRegion region_at(double lam) const;

  std::size_t n_ = 0, p_ = 0;
  double tau_ = 0.5;
  double g_ = 0.0;      // max of <theta, y> over the box
  double sum_y_ = 0.0;
  double y_norm_sq_ = 0.0;
  double lam_max_ = 0.0;
  Vector delta_;
  Vector col_norm_sq_, col_dot_y_, col_sum_;
  Vector weights_;  // empty when unweighted
};

ScreeningReport screen(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                       double lam, std::span<const double> weights = {},
                       double user_tol = 0.0);

// ||X^T theta||_inf <= lam + tol and tau-1-tol <= theta_i <= tau+tol.
bool dual_feasible(std::span<const double> theta, const Matrix& x, QuantileLevel tau,
                   double lam, double tol);

}  // namespace qrs
