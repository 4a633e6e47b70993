#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qrs/matrix.hpp"
#include "qrs/quantile.hpp"

namespace qrs {

struct SolveOptions {
  double tol_abs = 1e-6;
  double tol_rel = 1e-4;
  std::size_t max_iter = 20000;
  double sigma = 1.0;       // augmented-Lagrangian penalty
  double dual_step = 1.0;   // in (0, (1+sqrt(5))/2)
  bool adaptive_sigma = false;

  void validate() const;  // throws std::invalid_argument
};

// Primal/slack/dual iterates and residuals of the proximal ADMM.
struct SolverState {
  Vector beta;   // p
  Vector alpha;  // n
  Vector theta;  // n
  double sigma = 0.0;
  double eta = 0.0;  // proximal-linearization constant, >= sigma * ||X||_2^2
  std::size_t iter = 0;
  double primal_res = std::numeric_limits<double>::infinity();
  double dual_res = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Proximal (linearized) ADMM on the equality-constrained split of the
// pinball + l1 objective. The multiplier coincides with the dual variable
// of the box/l-inf dual, so screening bounds and KKT checks share it.
// Throws std::runtime_error("numerical divergence") on NaN/Inf iterates;
// non-convergence within max_iter returns the state with converged=false.
SolverState admm_solve(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                       double lam, const SolveOptions& opts = {},
                       const SolverState* warm = nullptr,
                       std::span<const double> weights = {});

// Max violation across the three optimality conditions:
// dist(X^T theta, lam * subdiff ||beta||_1), ||y - X beta - alpha||_inf,
// and max_i dist(theta_i, subdiff rho_tau(alpha_i)).
double kkt_residual(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                    double lam, const SolverState& state,
                    std::span<const double> weights = {});

double primal_objective(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                        double lam, std::span<const double> beta,
                        std::span<const double> weights = {});

// Primal objective minus <theta, y>, theta projected onto the dual
// feasible set first. Nonnegative for any feasible pair.
double duality_gap(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                   double lam, const SolverState& state,
                   std::span<const double> weights = {});

struct PathResult {
  Vector lambdas;  // strictly decreasing
  double lambda_max = 0.0;
  std::vector<Vector> betas;
  std::vector<std::vector<std::size_t>> eliminated;
  std::vector<double> solve_times;  // seconds, screening included
  std::vector<double> kkt_residuals;
  std::vector<bool> converged;
};

// Warm-started path over lam = ratio * lambda_max, largest ratio first.
// ratios must be sorted ascending within (0, 1]. With screening on, each
// lambda solves the reduced problem on the surviving columns and
// re-embeds exact zeros for the eliminated ones.
PathResult solve_path(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                      std::span<const double> ratios, bool screening,
                      const SolveOptions& opts = {},
                      std::span<const double> weights = {});

}  // namespace qrs
