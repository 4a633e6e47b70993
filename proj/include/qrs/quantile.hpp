#pragma once

#include <span>

#include "qrs/matrix.hpp"

namespace qrs {

// Quantile of interest; valid only on the open interval (0, 1).
class QuantileLevel {
 public:
  explicit QuantileLevel(double tau);  // throws std::invalid_argument outside (0,1)
  double value() const { return tau_; }

 private:
  double tau_;
};

// Closed interval [lo, hi]; a singleton has lo == hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double lo_, double hi_);  // throws if lo > hi

  bool contains(double x, double tol = 0.0) const {
    return x >= lo - tol && x <= hi + tol;
  }
  // 0 inside, distance to the nearest endpoint outside
  double distance(double x) const {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
  }
};

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// tau*xi for xi > 0, (tau-1)*xi for xi <= 0; always >= 0.
double pinball_loss(double xi, QuantileLevel tau);

// {tau} for xi > 0, [tau-1, tau] at 0, {tau-1} for xi < 0.
Interval pinball_subdiff(double xi, QuantileLevel tau);

// 0 on [tau-1, tau], +infinity outside.
double pinball_conjugate(double nu, QuantileLevel tau);

// argmin_u scale*rho_tau(u) + (u - xi)^2 / 2. scale must be > 0.
double pinball_prox(double xi, QuantileLevel tau, double scale = 1.0);

// Component-wise sign(x_i) * max(|x_i| - t, 0); t must be >= 0.
Vector soft_threshold(std::span<const double> x, double t);

// Membership test g in lam * subdiff(||beta||_1), within tol per coordinate.
bool l1_subdiff_member(std::span<const double> beta, std::span<const double> g,
                       double lam, double tol);

}  // namespace qrs
