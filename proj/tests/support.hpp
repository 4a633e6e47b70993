#pragma once

// Shared test utilities: random instance generation, brute-force oracles
// kept independent of the library's solution paths, and a certified
// reference solver (ADMM + LP active-set polish, gated by kkt_residual).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qrs/dual_bounds.hpp"
#include "qrs/matrix.hpp"
#include "qrs/quantile.hpp"
#include "qrs/simgen.hpp"
#include "qrs/solver.hpp"

namespace qrs::test {

// ---------------------------------------------------------------- random

inline Vector random_vector(SplitMix64& g, std::size_t n, double lo = -1.0,
                            double hi = 1.0) {
  Vector v(n);
  for (double& x : v) x = lo + (hi - lo) * g.uniform01();
  return v;
}

inline Matrix random_matrix(SplitMix64& g, std::size_t n, std::size_t p,
                            double lo = -1.0, double hi = 1.0) {
  Matrix m(n, p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) m(i, j) = lo + (hi - lo) * g.uniform01();
  return m;
}

// -------------------------------------------------------------- 1-D scans

// Brute-force grid minimizer of scale * rho_tau(u) + (u - xi)^2 / 2.
// Coarse pass over [lo, hi], then a fine pass around the winner.
inline double prox_scan_oracle(double xi, double tau, double scale, double lo = -5.0,
                               double hi = 5.0, double coarse = 1e-3,
                               double fine = 1e-7) {
  auto objective = [&](double u) {
    const double loss = u > 0.0 ? tau * u : (tau - 1.0) * u;
    return scale * loss + 0.5 * (u - xi) * (u - xi);
  };
  double best_u = lo, best_f = objective(lo);
  for (double u = lo; u <= hi; u += coarse) {
    const double f = objective(u);
    if (f < best_f) {
      best_f = f;
      best_u = u;
    }
  }
  double refined_u = best_u;
  double refined_f = best_f;
  for (double u = best_u - coarse; u <= best_u + coarse; u += fine) {
    const double f = objective(u);
    if (f < refined_f) {
      refined_f = f;
      refined_u = u;
    }
  }
  return refined_u;
}

// Brute-force grid minimizer of rho_tau(y - b) + lam * |b|.
inline double separable_scan_oracle(double y, double tau, double lam, double lo = -10.0,
                                    double hi = 10.0, double step = 1e-6) {
  auto objective = [&](double b) {
    const double xi = y - b;
    const double loss = xi > 0.0 ? tau * xi : (tau - 1.0) * xi;
    return loss + lam * std::fabs(b);
  };
  double best_b = lo, best_f = objective(lo);
  for (double b = lo; b <= hi; b += step) {
    const double f = objective(b);
    if (f < best_f) {
      best_f = f;
      best_b = b;
    }
  }
  return best_b;
}

// ------------------------------------------------- slab-ball angle oracle

// Brute-force max of <c, th> over the slab-ball region. The optimum lies in
// span{c, y}; scan n_angles points of the ball circle in that plane and add
// the exact face corners and the exact tangency point as candidates.
// Throws std::invalid_argument("empty dual region (oracle)") if no
// candidate is feasible.
inline double slab_ball_oracle(std::span<const double> c, std::span<const double> y,
                               const DualRegion& region, std::size_t n_angles) {
  const std::size_t n = c.size();
  double cc = 0.0, cy = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cc += c[i] * c[i];
    cy += c[i] * y[i];
    yy += y[i] * y[i];
  }
  if (cc == 0.0) return 0.0;
  const double rho = region.rho;
  const double y_norm = std::sqrt(yy);

  // 2-D coordinates: u along y, v along the part of c orthogonal to y.
  double c_par = 0.0, c_perp = std::sqrt(cc);
  if (y_norm > 0.0) {
    c_par = cy / y_norm;
    c_perp = std::sqrt(std::max(cc - c_par * c_par, 0.0));
  }
  auto feasible = [&](double u) {
    const double s = u * y_norm;
    return s <= region.b1 && s >= region.b2;
  };
  auto value = [&](double u, double v) { return c_par * u + c_perp * v; };

  bool any = false;
  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](double u, double v) {
    best = std::max(best, value(u, v));
    any = true;
  };

  for (std::size_t k = 0; k < n_angles; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) /
                       static_cast<double>(n_angles);
    const double u = rho * std::cos(phi), v = rho * std::sin(phi);
    if (feasible(u)) consider(u, v);
  }
  // exact corners where the slab faces cut the circle
  if (y_norm > 0.0) {
    for (double b : {region.b1, region.b2}) {
      const double u = b / y_norm;
      if (std::fabs(u) <= rho) {
        const double v = std::sqrt(std::max(rho * rho - u * u, 0.0));
        if (feasible(u)) {
          consider(u, v);
          consider(u, -v);
        }
      }
    }
  }
  // exact tangency point of the objective on the ball
  {
    const double norm2d = std::hypot(c_par, c_perp);
    if (norm2d > 0.0) {
      const double u = rho * c_par / norm2d, v = rho * c_perp / norm2d;
      if (feasible(u)) consider(u, v);
    }
  }
  if (!any) throw std::invalid_argument("empty dual region (oracle)");
  return best;
}

// ------------------------------------------------------ dense linear solve

// Gaussian elimination with partial pivoting; returns false when singular.
inline bool solve_dense(std::vector<Vector> cols, Vector rhs, Vector& out) {
  const std::size_t m = rhs.size();
  for (const auto& col : cols)
    if (col.size() != m) return false;
  if (cols.size() != m) return false;

  for (std::size_t k = 0; k < m; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < m; ++i)
      if (std::fabs(cols[k][i]) > std::fabs(cols[k][piv])) piv = i;
    if (cols[k][piv] == 0.0) return false;
    if (piv != k) {
      for (std::size_t j = k; j < m; ++j) std::swap(cols[j][k], cols[j][piv]);
      std::swap(rhs[k], rhs[piv]);
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      const double f = cols[k][i] / cols[k][k];
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < m; ++j) cols[j][i] -= f * cols[j][k];
      rhs[i] -= f * rhs[k];
    }
  }
  out.assign(m, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    double acc = rhs[k];
    for (std::size_t j = k + 1; j < m; ++j) acc -= cols[j][k] * out[j];
    out[k] = acc / cols[k][k];
  }
  for (double v : out)
    if (!std::isfinite(v)) return false;
  return true;
}

// ------------------------------------------------------- reference solver

// LP vertex polish: take the support A from the iterate, interpolate the
// |A| samples with the smallest residuals, and rebuild (beta, alpha, theta)
// from the two square systems the optimality conditions imply. The result
// counts only if kkt_residual certifies it.
inline bool polish_vertex(const Matrix& x, std::span<const double> y,
                          QuantileLevel tau, double lam, SolverState& st,
                          std::span<const double> weights, double kkt_target) {
  const std::size_t n = x.rows(), p = x.cols();
  const double t = tau.value();

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < p; ++j)
    if (st.beta[j] != 0.0) active.push_back(j);
  const std::size_t a = active.size();
  if (a > n) return false;

  Vector u(n);
  {
    Vector xb = matvec(x, st.beta);
    for (std::size_t i = 0; i < n; ++i) u[i] = y[i] - xb[i];
  }

  Vector beta_new(p, 0.0);
  std::vector<std::size_t> interp;
  if (a > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t k) { return std::fabs(u[i]) < std::fabs(u[k]); });
    interp.assign(order.begin(), order.begin() + a);
    std::sort(interp.begin(), interp.end());

    std::vector<Vector> cols(a, Vector(a));
    Vector rhs(a);
    for (std::size_t col = 0; col < a; ++col)
      for (std::size_t row = 0; row < a; ++row)
        cols[col][row] = x(interp[row], active[col]);
    for (std::size_t row = 0; row < a; ++row) rhs[row] = y[interp[row]];
    Vector beta_a;
    if (!solve_dense(cols, rhs, beta_a)) return false;
    for (std::size_t k = 0; k < a; ++k) beta_new[active[k]] = beta_a[k];
  }

  Vector u_new(n);
  {
    Vector xb = matvec(x, beta_new);
    for (std::size_t i = 0; i < n; ++i) u_new[i] = y[i] - xb[i];
    for (std::size_t i : interp) u_new[i] = 0.0;
  }

  Vector theta(n);
  for (std::size_t i = 0; i < n; ++i)
    theta[i] = u_new[i] > 0.0 ? t : (u_new[i] < 0.0 ? t - 1.0 : 0.0);

  if (a > 0) {
    // theta on the interpolated rows solves X_A^T theta = lam * w .* sign
    Vector rhs(a);
    for (std::size_t k = 0; k < a; ++k) {
      const std::size_t j = active[k];
      const double s = beta_new[j] != 0.0 ? sign(beta_new[j]) : sign(st.beta[j]);
      double acc = lam * (weights.empty() ? 1.0 : weights[j]) * s;
      auto col = x.col(j);
      for (std::size_t i = 0; i < n; ++i) acc -= col[i] * theta[i];
      for (std::size_t i : interp) acc += x(i, j) * theta[i];  // unknowns
      rhs[k] = acc;
    }
    std::vector<Vector> cols(a, Vector(a));
    for (std::size_t col = 0; col < a; ++col)
      for (std::size_t row = 0; row < a; ++row)
        cols[col][row] = x(interp[col], active[row]);  // transposed system
    Vector theta_i;
    if (!solve_dense(cols, rhs, theta_i)) return false;
    for (std::size_t k = 0; k < a; ++k) theta[interp[k]] = theta_i[k];
  }

  SolverState cand = st;
  cand.beta = std::move(beta_new);
  cand.alpha = std::move(u_new);
  cand.theta = std::move(theta);
  const double kkt = kkt_residual(x, y, tau, lam, cand, weights);
  if (!(kkt <= kkt_target)) return false;
  cand.primal_res = 0.0;
  cand.dual_res = kkt;
  cand.converged = true;
  st = std::move(cand);
  return true;
}

// Reference solve certified to kkt_residual <= kkt_target: a ladder of
// ADMM tolerances, attempting the vertex polish after each rung. Throws if
// certification fails at every rung.
inline SolverState reference_solve(const Matrix& x, std::span<const double> y,
                                   QuantileLevel tau, double lam,
                                   double kkt_target = 1e-9,
                                   const SolverState* warm = nullptr,
                                   std::span<const double> weights = {}) {
  SolveOptions opts;
  opts.tol_rel = 0.0;
  opts.max_iter = 2000000;
  SolverState st;
  const SolverState* chain = warm;
  for (double tol : {1e-5, 1e-7, 1e-9, 1e-11}) {
    opts.tol_abs = tol;
    st = admm_solve(x, y, tau, lam, opts, chain, weights);
    chain = &st;
    if (kkt_residual(x, y, tau, lam, st, weights) <= kkt_target) return st;
    SolverState polished = st;
    if (polish_vertex(x, y, tau, lam, polished, weights, kkt_target))
      return polished;
  }
  throw std::runtime_error("reference_solve: could not certify kkt <= " +
                           std::to_string(kkt_target));
}

// Warm-started certified solves along a descending ratio grid; calls fn
// with (index, lambda, state) per grid point, largest ratio first.
template <typename Fn>
void reference_path(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                    std::span<const double> ratios_desc, double lam_max,
                    double kkt_target, Fn&& fn,
                    std::span<const double> weights = {}) {
  SolverState chain;
  bool have = false;
  for (std::size_t k = 0; k < ratios_desc.size(); ++k) {
    const double lam = ratios_desc[k] * lam_max;
    chain = reference_solve(x, y, tau, lam, kkt_target, have ? &chain : nullptr,
                            weights);
    have = true;
    fn(k, lam, chain);
  }
}

inline Vector linspace(double lo, double hi, std::size_t count) {
  Vector v(count);
  if (count == 1) {
    v[0] = hi;
    return v;
  }
  for (std::size_t k = 0; k < count; ++k)
    v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  return v;
}

}  // namespace qrs::test
