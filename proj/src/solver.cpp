#include "qrs/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qrs/dual_bounds.hpp"
#include "qrs/kernels.hpp"

namespace qrs {

namespace {

constexpr double kGoldenStepLimit = 1.6180339887498949;  // (1+sqrt(5))/2
constexpr double kEtaSafety = 1.05;
constexpr double kEtaFloor = 1e-12;
constexpr int kDualScaleRefresh = 25;

// Fixed point of the iteration whenever lam >= lambda_max: beta = 0,
// alpha = y, theta at the box extremes (0 on zero-response coordinates).
void default_start(std::span<const double> y, double tau, SolverState& st,
                   std::size_t p) {
  const std::size_t n = y.size();
  st.beta.assign(p, 0.0);
  st.alpha.assign(y.begin(), y.end());
  st.theta.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] > 0.0)
      st.theta[i] = tau;
    else if (y[i] < 0.0)
      st.theta[i] = tau - 1.0;
  }
}

void check_weights(std::span<const double> weights, std::size_t p) {
  if (weights.empty()) return;
  if (weights.size() != p)
    throw std::invalid_argument("weights length does not match feature count");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be strictly positive");
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

void SolveOptions::validate() const {
  if (!(tol_abs > 0.0) || !(tol_rel >= 0.0))
    throw std::invalid_argument("tolerances must be positive (tol_abs) and >= 0 (tol_rel)");
  if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(dual_step > 0.0) || !(dual_step < kGoldenStepLimit))
    throw std::invalid_argument("dual_step must lie in (0, (1+sqrt(5))/2)");
}

SolverState admm_solve(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                       double lam, const SolveOptions& opts, const SolverState* warm,
                       std::span<const double> weights) {
  opts.validate();
  if (!(lam > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (x.rows() != y.size())
    throw std::invalid_argument("admm_solve: X rows do not match y length");
  const std::size_t n = x.rows(), p = x.cols();
  check_weights(weights, p);
  const double t = tau.value();

  SolverState st;
  if (warm != nullptr && warm->beta.size() == p && warm->alpha.size() == n &&
      warm->theta.size() == n) {
    st.beta = warm->beta;
    st.alpha = warm->alpha;
    st.theta = warm->theta;
  } else {
    default_start(y, t, st, p);
  }
  st.sigma = (warm != nullptr && warm->sigma > 0.0) ? warm->sigma : opts.sigma;
  if (warm != nullptr && warm->eta > 0.0 && warm->sigma > 0.0) {
    st.eta = warm->eta * (st.sigma / warm->sigma);
  } else {
    st.eta = std::max(kEtaSafety * st.sigma * spectral_norm_sq(x), kEtaFloor);
  }

  Vector xb = matvec(x, st.beta);
  Vector v(n), w(n), xdelta(n), resid(n);
  const double y_norm = std::sqrt(kernels::nrm2sq(y));
  double dual_scale = 0.0;
  int scale_age = kDualScaleRefresh;  // force refresh on first check
  const kernels::Table& K = kernels::table();
  const double* xdata = x.data().data();

  for (st.iter = 1; st.iter <= opts.max_iter; ++st.iter) {
    const double sigma = st.sigma, eta = st.eta;

    // alpha step: coordinate-wise prox of the pinball at scale 1/sigma
    for (std::size_t i = 0; i < n; ++i)
      v[i] = y[i] - xb[i] + st.theta[i] / sigma;
    K.pinball_prox(v.data(), (t - 1.0) / sigma, t / sigma, st.alpha.data(), n);

    // beta step: linearized prox-gradient with soft threshold lam/eta,
    // fused per column so the axpy reuses the column just read by the dot
    for (std::size_t i = 0; i < n; ++i)
      w[i] = xb[i] + st.alpha[i] - y[i] - st.theta[i] / sigma;
    const double step = sigma / eta;
    const double thr0 = lam / eta;
    std::fill(xdelta.begin(), xdelta.end(), 0.0);
    double dbeta_sq = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double* col = xdata + j * n;
      const double cand = st.beta[j] - step * K.dot(col, w.data(), n);
      const double thr = weights.empty() ? thr0 : thr0 * weights[j];
      const double mag = std::fabs(cand) - thr;
      const double next = mag > 0.0 ? (cand > 0.0 ? mag : -mag) : 0.0;
      const double d = next - st.beta[j];
      if (d != 0.0) {
        K.axpy(d, col, xdelta.data(), n);
        dbeta_sq += d * d;
        st.beta[j] = next;
      }
    }
    for (std::size_t i = 0; i < n; ++i) xb[i] += xdelta[i];

    // multiplier step on the constraint y - X beta - alpha = 0
    for (std::size_t i = 0; i < n; ++i) resid[i] = xb[i] + st.alpha[i] - y[i];
    for (std::size_t i = 0; i < n; ++i)
      st.theta[i] -= opts.dual_step * sigma * resid[i];

    st.primal_res = std::sqrt(K.nrm2sq(resid.data(), n));
    const double sigma_xdelta = sigma * std::sqrt(K.nrm2sq(xdelta.data(), n));
    st.dual_res = std::max(eta * std::sqrt(dbeta_sq), sigma_xdelta);

    if (!std::isfinite(st.primal_res) || !std::isfinite(st.dual_res))
      throw std::runtime_error("numerical divergence in admm_solve");

    if (++scale_age >= kDualScaleRefresh) {
      Vector xt = tmatvec(x, st.theta);
      dual_scale = std::sqrt(kernels::nrm2sq(xt));
      scale_age = 0;
    }
    const double eps_pri =
        opts.tol_abs + opts.tol_rel * std::max({y_norm, std::sqrt(K.nrm2sq(xb.data(), n)),
                                                std::sqrt(K.nrm2sq(st.alpha.data(), n))});
    const double eps_dual = opts.tol_abs + opts.tol_rel * dual_scale;
    if (st.primal_res <= eps_pri && st.dual_res <= eps_dual) {
      st.converged = true;
      break;
    }

    if (opts.adaptive_sigma && st.iter % 10 == 0) {
      if (st.primal_res > 10.0 * st.dual_res) {
        st.sigma *= 2.0;
        st.eta *= 2.0;
      } else if (st.dual_res > 10.0 * st.primal_res) {
        st.sigma *= 0.5;
        st.eta *= 0.5;
      }
    }
  }
  st.iter = std::min(st.iter, opts.max_iter);
  return st;
}

double kkt_residual(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                    double lam, const SolverState& state,
                    std::span<const double> weights) {
  const std::size_t n = x.rows(), p = x.cols();
  check_weights(weights, p);

  double worst = 0.0;

  Vector xt = tmatvec(x, state.theta);
  for (std::size_t j = 0; j < p; ++j) {
    const double bound = lam * (weights.empty() ? 1.0 : weights[j]);
    const double viol = state.beta[j] != 0.0
                            ? std::fabs(xt[j] - bound * sign(state.beta[j]))
                            : std::max(std::fabs(xt[j]) - bound, 0.0);
    worst = std::max(worst, viol);
  }

  Vector xb = matvec(x, state.beta);
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, std::fabs(y[i] - xb[i] - state.alpha[i]));

  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, pinball_subdiff(state.alpha[i], tau).distance(state.theta[i]));

  return worst;
}

double primal_objective(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                        double lam, std::span<const double> beta,
                        std::span<const double> weights) {
  check_weights(weights, x.cols());
  Vector xb = matvec(x, beta);
  double obj = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    obj += pinball_loss(y[i] - xb[i], tau);
  for (std::size_t j = 0; j < beta.size(); ++j)
    obj += lam * (weights.empty() ? 1.0 : weights[j]) * std::fabs(beta[j]);
  return obj;
}

double duality_gap(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                   double lam, const SolverState& state,
                   std::span<const double> weights) {
  const double t = tau.value();
  check_weights(weights, x.cols());

  // Project the multiplier onto the dual feasible set: clamp into the box,
  // then shrink toward the origin (feasible, since 0 is interior) until
  // every |X_.j^T theta| fits under its bound.
  Vector theta(state.theta.begin(), state.theta.end());
  for (double& v : theta) v = std::clamp(v, t - 1.0, t);
  Vector xt = tmatvec(x, theta);
  double overshoot = 0.0;
  for (std::size_t j = 0; j < xt.size(); ++j) {
    const double bound = lam * (weights.empty() ? 1.0 : weights[j]);
    if (bound > 0.0) overshoot = std::max(overshoot, std::fabs(xt[j]) / bound);
  }
  if (overshoot > 1.0)
    for (double& v : theta) v /= overshoot;

  const double dual = kernels::dot(theta, y);
  return primal_objective(x, y, tau, lam, state.beta, weights) - dual;
}

PathResult solve_path(const Matrix& x, std::span<const double> y, QuantileLevel tau,
                      std::span<const double> ratios, bool screening,
                      const SolveOptions& opts, std::span<const double> weights) {
  opts.validate();
  if (ratios.empty()) return {};
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (!(ratios[k] > 0.0) || ratios[k] > 1.0)
      throw std::invalid_argument("path ratios must lie in (0, 1]");
    if (k > 0 && ratios[k] <= ratios[k - 1])
      throw std::invalid_argument("path ratios must be strictly increasing");
  }
  check_weights(weights, x.cols());

  const std::size_t n = x.rows(), p = x.cols();
  ScreeningContext ctx(x, y, tau, weights);
  const double lam_max = ctx.lambda_max();
  if (!(lam_max > 0.0))
    throw std::invalid_argument("lambda_max is 0: every penalty level admits the zero solution");

  PathResult out;
  out.lambda_max = lam_max;

  SolverState chain;
  default_start(y, tau.value(), chain, p);
  chain.sigma = opts.sigma;
  chain.eta = std::max(kEtaSafety * opts.sigma * spectral_norm_sq(x), kEtaFloor);

  std::vector<std::size_t> all_idx(p);
  std::iota(all_idx.begin(), all_idx.end(), 0);

  for (std::size_t k = ratios.size(); k-- > 0;) {
    const double lam = ratios[k] * lam_max;
    const double t0 = now_seconds();

    std::vector<std::size_t> elim;
    SolverState solved;
    if (screening) {
      elim = ctx.eliminate_at(lam);
      std::vector<std::size_t> kept;
      kept.reserve(p - elim.size());
      std::set_difference(all_idx.begin(), all_idx.end(), elim.begin(), elim.end(),
                          std::back_inserter(kept));
      Matrix xs = x.select_cols(kept);
      SolverState warm;
      warm.beta.resize(kept.size());
      for (std::size_t k2 = 0; k2 < kept.size(); ++k2)
        warm.beta[k2] = chain.beta[kept[k2]];
      warm.alpha = chain.alpha;
      warm.theta = chain.theta;
      warm.sigma = chain.sigma;
      warm.eta = chain.eta;  // valid: column subsets cannot grow the norm
      Vector ws;
      if (!weights.empty()) {
        ws.resize(kept.size());
        for (std::size_t k2 = 0; k2 < kept.size(); ++k2) ws[k2] = weights[kept[k2]];
      }
      solved = admm_solve(xs, y, tau, lam, opts, &warm, ws);
      // re-embed; screened-out coordinates are exactly zero
      Vector full(p, 0.0);
      for (std::size_t k2 = 0; k2 < kept.size(); ++k2)
        full[kept[k2]] = solved.beta[k2];
      solved.beta.swap(full);
    } else {
      solved = admm_solve(x, y, tau, lam, opts, &chain, weights);
    }
    const double t1 = now_seconds();

    chain = solved;
    out.lambdas.push_back(lam);
    out.betas.push_back(solved.beta);
    out.eliminated.push_back(std::move(elim));
    out.solve_times.push_back(t1 - t0);
    out.kkt_residuals.push_back(kkt_residual(x, y, tau, lam, solved, weights));
    out.converged.push_back(solved.converged);
  }
  return out;
}

}  // namespace qrs
