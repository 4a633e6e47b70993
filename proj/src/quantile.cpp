#include "qrs/quantile.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qrs/kernels.hpp"

namespace qrs {

QuantileLevel::QuantileLevel(double tau) : tau_(tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("quantile level must lie in (0, 1), got " +
                                std::to_string(tau));
}

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (lo > hi) throw std::invalid_argument("interval requires lo <= hi");
}

double pinball_loss(double xi, QuantileLevel tau) {
  const double t = tau.value();
  return xi > 0.0 ? t * xi : (t - 1.0) * xi;
}

Interval pinball_subdiff(double xi, QuantileLevel tau) {
  const double t = tau.value();
  if (xi > 0.0) return {t, t};
  if (xi < 0.0) return {t - 1.0, t - 1.0};
  return {t - 1.0, t};
}

double pinball_conjugate(double nu, QuantileLevel tau) {
  const double t = tau.value();
  if (nu >= t - 1.0 && nu <= t) return 0.0;
  return std::numeric_limits<double>::infinity();
}

double pinball_prox(double xi, QuantileLevel tau, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("prox scale must be > 0");
  const double hi = tau.value() * scale;
  const double lo = (tau.value() - 1.0) * scale;
  if (xi >= hi) return xi - hi;
  if (xi <= lo) return xi - lo;
  return 0.0;
}

Vector soft_threshold(std::span<const double> x, double t) {
  if (t < 0.0) throw std::invalid_argument("soft threshold must be >= 0");
  Vector out(x.size());
  kernels::soft_threshold(x, t, out);
  return out;
}

bool l1_subdiff_member(std::span<const double> beta, std::span<const double> g,
                       double lam, double tol) {
  if (beta.size() != g.size())
    throw std::invalid_argument("l1_subdiff_member: length mismatch");
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] != 0.0) {
      if (std::fabs(g[i] - lam * sign(beta[i])) > tol) return false;
    } else {
      if (std::fabs(g[i]) > lam + tol) return false;
    }
  }
  return true;
}

}  // namespace qrs
