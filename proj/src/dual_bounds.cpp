#include "qrs/dual_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qrs/kernels.hpp"

namespace qrs {

namespace {

constexpr double kFaceSlack = 1e-12;  // relative, for |b| vs rho*||y|| ties

void check_lambda_in_range(double lam, double lam_max) {
  if (!(lam > 0.0) || lam > lam_max)
    throw std::invalid_argument(
        "lambda " + std::to_string(lam) + " outside (0, lambda_max]; lambda_max = " +
        std::to_string(lam_max));
}

}  // namespace

SignPartition sign_partition(std::span<const double> y) {
  SignPartition part;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0)
      part.positive.push_back(i);
    else if (y[i] < 0.0)
      part.negative.push_back(i);
    else
      part.zero.push_back(i);
  }
  return part;
}

Vector compute_delta(const Matrix& x, std::span<const double> y, QuantileLevel tau) {
  if (x.rows() != y.size())
    throw std::invalid_argument("compute_delta: X rows do not match y length");
  const double t = tau.value();
  const std::size_t n = x.rows(), p = x.cols();
  Vector delta(p);
  for (std::size_t j = 0; j < p; ++j) {
    auto col = x.col(j);
    double zeta = 0.0;   // contribution of the fixed box coordinates
    double up = 0.0;     // max of sum_{y_i = 0} kappa_i X_ij
    double down = 0.0;   // max of the negated sum
    for (std::size_t i = 0; i < n; ++i) {
      const double v = col[i];
      if (y[i] > 0.0) {
        zeta += t * v;
      } else if (y[i] < 0.0) {
        zeta += (t - 1.0) * v;
      } else {
        up += v >= 0.0 ? t * v : (t - 1.0) * v;
        down += v >= 0.0 ? -(t - 1.0) * v : -t * v;
      }
    }
    delta[j] = std::max(zeta + up, -zeta + down);
  }
  return delta;
}

double lambda_max(const Matrix& x, std::span<const double> y, QuantileLevel tau) {
  Vector delta = compute_delta(x, y, tau);
  return kernels::max_abs(delta);
}

double lambda_max_weighted(const Matrix& x, std::span<const double> y,
                           QuantileLevel tau, std::span<const double> weights) {
  if (weights.size() != x.cols())
    throw std::invalid_argument("weights length does not match feature count");
  double wmin = std::numeric_limits<double>::infinity();
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("weights must be strictly positive");
    wmin = std::min(wmin, w);
  }
  return lambda_max(x, y, tau) / wmin;
}

DualRegion dual_region(std::span<const double> y, QuantileLevel tau, double lam,
                       double lam_max) {
  check_lambda_in_range(lam, lam_max);
  const double t = tau.value();
  double g = 0.0, sum_y = 0.0;
  for (double v : y) {
    sum_y += v;
    if (v > 0.0)
      g += t * v;
    else if (v < 0.0)
      g += (t - 1.0) * v;
  }
  DualRegion region;
  region.rho = std::sqrt(static_cast<double>(y.size())) / 2.0;
  region.shift = t - 0.5;
  region.b1 = g - region.shift * sum_y;
  region.b2 = (lam / lam_max) * g - region.shift * sum_y;
  region.y_norm = std::sqrt(kernels::nrm2sq(y));
  return region;
}

double slab_ball_max_core(double c_norm_sq, double c_dot_y, double y_norm_sq,
                          const DualRegion& region) {
  if (c_norm_sq <= 0.0) return 0.0;
  const double c_norm = std::sqrt(c_norm_sq);
  const double rho = region.rho;

  if (y_norm_sq <= 0.0) {
    // Trivial slab: the constraint reads b2 <= 0 <= b1.
    if (region.b2 <= 0.0 && region.b1 >= 0.0) return rho * c_norm;
    throw std::invalid_argument("empty dual region");
  }

  // Slab value at the unconstrained ball maximizer rho * c / ||c||.
  const double s = rho * c_dot_y / c_norm;
  if (s <= region.b1 && s >= region.b2) return rho * c_norm;

  const double b = s > region.b1 ? region.b1 : region.b2;
  const double y_norm = std::sqrt(y_norm_sq);
  const double u = b / y_norm;  // offset of the active face along y
  if (std::fabs(u) > rho * (1.0 + kFaceSlack))
    throw std::invalid_argument("empty dual region");
  const double chord_sq = std::max(rho * rho - u * u, 0.0);
  const double c_perp_sq = std::max(c_norm_sq - c_dot_y * c_dot_y / y_norm_sq, 0.0);
  return b * c_dot_y / y_norm_sq + std::sqrt(c_perp_sq * chord_sq);
}

double slab_ball_max(std::span<const double> c, std::span<const double> y,
                     const DualRegion& region) {
  if (c.size() != y.size())
    throw std::invalid_argument("slab_ball_max: dimension mismatch");
  return slab_ball_max_core(kernels::nrm2sq(c), kernels::dot(c, y),
                            kernels::nrm2sq(y), region);
}

std::optional<double> case_table_distance(double cos_gamma, const DualRegion& region) {
  const double rho = region.rho;
  if (region.y_norm <= 0.0 || rho <= 0.0) return std::nullopt;
  const double t1 = std::fabs(region.b1) / region.y_norm;
  const double t2 = std::fabs(region.b2) / region.y_norm;
  const double sin_gamma = std::sqrt(std::max(1.0 - cos_gamma * cos_gamma, 0.0));
  const double sgn_b2 = sign(region.b2);

  if (region.b1 >= 0.0) {
    if (sgn_b2 * t2 / rho <= cos_gamma && cos_gamma <= t1 / rho) return rho;
    if (cos_gamma > t1 / rho)
      return t1 / cos_gamma + std::sqrt(rho * rho - t1 * t1) * sin_gamma -
             t1 * (sin_gamma / cos_gamma) * sin_gamma;
    if (region.b2 >= 0.0 && cos_gamma < t2 / rho)
      return std::sqrt(rho * rho - t2 * t2) * sin_gamma + t2 * cos_gamma;
    if (region.b2 < 0.0 && cos_gamma < -t2 / rho)
      return -t2 / cos_gamma + std::sqrt(rho * rho - t2 * t2) * sin_gamma +
             t2 * (sin_gamma / cos_gamma) * sin_gamma;
    return std::nullopt;
  }
  // The printed b1 < 0 rows overlap and disagree with the subcase
  // derivations they summarize; no literal reading selects a unique row.
  return std::nullopt;
}

std::vector<FeatureBound> feature_bounds(const Matrix& x, std::span<const double> y,
                                         QuantileLevel tau, double lam,
                                         double lam_max) {
  const DualRegion region = dual_region(y, tau, lam, lam_max);
  const double y_norm_sq = region.y_norm * region.y_norm;
  const double t1 = region.y_norm > 0.0 ? std::fabs(region.b1) / region.y_norm : 0.0;
  const double t2 = region.y_norm > 0.0 ? std::fabs(region.b2) / region.y_norm : 0.0;

  std::vector<FeatureBound> bounds(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    const double cns = kernels::nrm2sq(col);
    const double cy = kernels::dot(col, y);
    const double cs = kernels::sum(col);
    FeatureBound& fb = bounds[j];
    fb.t1 = t1;
    fb.t2 = t2;
    if (cns > 0.0) {
      const double z_plus = slab_ball_max_core(cns, cy, y_norm_sq, region);
      const double z_minus = slab_ball_max_core(cns, -cy, y_norm_sq, region);
      const double c_norm = std::sqrt(cns);
      fb.p_plus = z_plus + region.shift * cs;
      fb.p_minus = z_minus + region.shift * cs;
      fb.d_plus = z_plus / c_norm;
      fb.d_minus = z_minus / c_norm;
      if (region.y_norm > 0.0) {
        fb.cos_gamma_plus = cy / (c_norm * region.y_norm);
        fb.cos_gamma_minus = -fb.cos_gamma_plus;
      }
    }
  }
  return bounds;
}

ScreeningContext::ScreeningContext(const Matrix& x, std::span<const double> y,
                                   QuantileLevel tau, std::span<const double> weights)
    : n_(x.rows()), p_(x.cols()), tau_(tau.value()) {
  if (x.rows() != y.size())
    throw std::invalid_argument("screening: X rows do not match y length");
  const double t = tau_;
  for (double v : y) {
    sum_y_ += v;
    if (v > 0.0)
      g_ += t * v;
    else if (v < 0.0)
      g_ += (t - 1.0) * v;
  }
  y_norm_sq_ = kernels::nrm2sq(y);
  delta_ = compute_delta(x, y, tau);
  lam_max_ = kernels::max_abs(delta_);

  if (!weights.empty()) {
    if (weights.size() != p_)
      throw std::invalid_argument("weights length does not match feature count");
    double wmin = std::numeric_limits<double>::infinity();
    for (double w : weights) {
      if (!(w > 0.0))
        throw std::invalid_argument("weights must be strictly positive");
      wmin = std::min(wmin, w);
    }
    weights_.assign(weights.begin(), weights.end());
    lam_max_ /= wmin;
  }

  col_norm_sq_.resize(p_);
  col_dot_y_.resize(p_);
  col_sum_.resize(p_);
  for (std::size_t j = 0; j < p_; ++j) {
    auto col = x.col(j);
    col_norm_sq_[j] = kernels::nrm2sq(col);
    col_dot_y_[j] = kernels::dot(col, y);
    col_sum_[j] = kernels::sum(col);
  }
}

DualRegion ScreeningContext::region_at(double lam) const {
  check_lambda_in_range(lam, lam_max_);
  DualRegion region;
  region.rho = std::sqrt(static_cast<double>(n_)) / 2.0;
  region.shift = tau_ - 0.5;
  region.b1 = g_ - region.shift * sum_y_;
  region.b2 = (lam / lam_max_) * g_ - region.shift * sum_y_;
  region.y_norm = std::sqrt(y_norm_sq_);
  return region;
}

std::vector<std::size_t> ScreeningContext::eliminate_at(double lam,
                                                        double user_tol) const {
  if (user_tol < 0.0) throw std::invalid_argument("screening tolerance must be >= 0");
  const DualRegion region = region_at(lam);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < p_; ++j) {
    const double wj = weights_.empty() ? 1.0 : weights_[j];
    if (col_norm_sq_[j] <= 0.0) {
      out.push_back(j);  // both bounds vanish; lam * wj > 0
      continue;
    }
    const double z_plus =
        slab_ball_max_core(col_norm_sq_[j], col_dot_y_[j], y_norm_sq_, region);
    const double z_minus =
        slab_ball_max_core(col_norm_sq_[j], -col_dot_y_[j], y_norm_sq_, region);
    const double extra = region.shift * col_sum_[j];
    if (std::max(z_plus + extra, z_minus + extra) < lam * wj - user_tol)
      out.push_back(j);
  }
  return out;
}

ScreeningReport ScreeningContext::report_at(double lam, double user_tol) const {
  ScreeningReport report;
  report.lambda = lam;
  report.lambda_max_used = lam_max_;
  report.eliminated = eliminate_at(lam, user_tol);

  const DualRegion region = region_at(lam);
  const double t1 =
      region.y_norm > 0.0 ? std::fabs(region.b1) / region.y_norm : 0.0;
  const double t2 =
      region.y_norm > 0.0 ? std::fabs(region.b2) / region.y_norm : 0.0;
  report.bounds.resize(p_);
  for (std::size_t j = 0; j < p_; ++j) {
    FeatureBound& fb = report.bounds[j];
    fb.t1 = t1;
    fb.t2 = t2;
    if (col_norm_sq_[j] <= 0.0) continue;
    const double z_plus =
        slab_ball_max_core(col_norm_sq_[j], col_dot_y_[j], y_norm_sq_, region);
    const double z_minus =
        slab_ball_max_core(col_norm_sq_[j], -col_dot_y_[j], y_norm_sq_, region);
    const double c_norm = std::sqrt(col_norm_sq_[j]);
    fb.p_plus = z_plus + region.shift * col_sum_[j];
    fb.p_minus = z_minus + region.shift * col_sum_[j];
    fb.d_plus = z_plus / c_norm;
    fb.d_minus = z_minus / c_norm;
    if (region.y_norm > 0.0) {
      fb.cos_gamma_plus = col_dot_y_[j] / (c_norm * region.y_norm);
      fb.cos_gamma_minus = -fb.cos_gamma_plus;
    }
  }
  return report;
}

ScreeningReport screen(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                       double lam, std::span<const double> weights, double user_tol) {
  ScreeningContext ctx(x, y, tau, weights);
  return ctx.report_at(lam, user_tol);
}

bool dual_feasible(std::span<const double> theta, const Matrix& x, QuantileLevel tau,
                   double lam, double tol) {
  const double t = tau.value();
  for (double v : theta)
    if (v < t - 1.0 - tol || v > t + tol) return false;
  Vector xt = tmatvec(x, theta);
  return kernels::max_abs(xt) <= lam + tol;
}

}  // namespace qrs
