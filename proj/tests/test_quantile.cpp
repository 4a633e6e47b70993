#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "qrs/quantile.hpp"
#include "qrs/simgen.hpp"
#include "support.hpp"

using namespace qrs;

TEST_CASE("quantile level rejects values outside (0,1)") {
  CHECK_NOTHROW(QuantileLevel(0.5));
  CHECK_NOTHROW(QuantileLevel(1e-9));
  CHECK_THROWS_AS(QuantileLevel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(QuantileLevel(1.0), std::invalid_argument);
  CHECK_THROWS_AS(QuantileLevel(-0.3), std::invalid_argument);
  CHECK_THROWS_AS(QuantileLevel(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("pinball loss values") {
  CHECK(pinball_loss(2.0, QuantileLevel(0.5)) == 1.0);
  CHECK(pinball_loss(0.0, QuantileLevel(0.3)) == 0.0);
  CHECK(pinball_loss(-4.0, QuantileLevel(0.25)) == 3.0);
}

TEST_CASE("pinball loss is nonnegative and convex") {
  SplitMix64 g(11);
  for (int it = 0; it < 10000; ++it) {
    const QuantileLevel tau(0.02 + 0.96 * g.uniform01());
    const double x1 = 20.0 * g.uniform01() - 10.0;
    const double x2 = 20.0 * g.uniform01() - 10.0;
    const double mu = g.uniform01();
    CHECK(pinball_loss(x1, tau) >= 0.0);
    const double mix = pinball_loss(mu * x1 + (1.0 - mu) * x2, tau);
    const double hull = mu * pinball_loss(x1, tau) + (1.0 - mu) * pinball_loss(x2, tau);
    CHECK(mix <= hull + 1e-12);
  }
}

TEST_CASE("pinball subdifferential") {
  const Interval a = pinball_subdiff(1.0, QuantileLevel(0.25));
  CHECK(a.lo == 0.25);
  CHECK(a.hi == 0.25);
  const Interval b = pinball_subdiff(0.0, QuantileLevel(0.25));
  CHECK(b.lo == -0.75);
  CHECK(b.hi == 0.25);
  const Interval c = pinball_subdiff(-1.0, QuantileLevel(0.5));
  CHECK(c.lo == -0.5);
  CHECK(c.hi == -0.5);
}

TEST_CASE("pinball conjugate is the box indicator") {
  CHECK(pinball_conjugate(0.0, QuantileLevel(0.5)) == 0.0);
  for (double tau : {0.25, 0.5, 0.9})
    CHECK(pinball_conjugate(tau, QuantileLevel(tau)) == 0.0);
  CHECK(std::isinf(pinball_conjugate(1.5, QuantileLevel(0.5))));
}

TEST_CASE("conjugate matches the grid supremum of xi*nu - loss") {
  SplitMix64 g(12);
  auto grid_sup = [](double nu, double tau, double range, std::size_t steps) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= steps; ++k) {
      const double xi = -range + 2.0 * range * static_cast<double>(k) / steps;
      const double loss = xi > 0.0 ? tau * xi : (tau - 1.0) * xi;
      best = std::max(best, xi * nu - loss);
    }
    return best;
  };
  for (int it = 0; it < 2000; ++it) {
    const double tau = 0.05 + 0.9 * g.uniform01();
    // inside the box: supremum stays at zero
    const double nu_in = (tau - 1.0) + g.uniform01() * 1.0;
    if (nu_in >= tau - 1.0 && nu_in <= tau) {
      CHECK(grid_sup(nu_in, tau, 1e3, 2000) <= 1e-9);
      CHECK(pinball_conjugate(nu_in, QuantileLevel(tau)) == 0.0);
    }
    // outside: grows without bound as the grid range grows
    const double margin = 0.01 + g.uniform01();
    const double nu_out = g.uniform01() < 0.5 ? tau + margin : tau - 1.0 - margin;
    const double sup1 = grid_sup(nu_out, tau, 1e3, 2000);
    const double sup2 = grid_sup(nu_out, tau, 2e3, 2000);
    CHECK(sup1 >= 1e3 * margin * 0.999);
    CHECK(sup2 > sup1);
    CHECK(std::isinf(pinball_conjugate(nu_out, QuantileLevel(tau))));
  }
}

TEST_CASE("pinball prox closed form") {
  CHECK(pinball_prox(0.3, QuantileLevel(0.5), 1.0) == 0.0);
  CHECK(pinball_prox(1.0, QuantileLevel(0.25), 1.0) == 0.75);
  CHECK(pinball_prox(2.0, QuantileLevel(0.5), 2.0) == 1.0);  // grid-verified below
  CHECK_THROWS_AS(pinball_prox(1.0, QuantileLevel(0.5), 0.0), std::invalid_argument);
}

TEST_CASE("pinball prox agrees with the fine grid scan") {
  CHECK(std::fabs(test::prox_scan_oracle(2.0, 0.5, 2.0, -5.0, 5.0, 1e-6, 1e-6) - 1.0) <=
        2e-6);
  SplitMix64 g(13);
  for (int it = 0; it < 300; ++it) {
    const double tau = 0.05 + 0.9 * g.uniform01();
    const double c = 0.05 + 3.0 * g.uniform01();
    const double xi = 8.0 * g.uniform01() - 4.0;
    const double u = pinball_prox(xi, QuantileLevel(tau), c);
    const double scanned = test::prox_scan_oracle(xi, tau, c);
    CHECK(std::fabs(u - scanned) <= 3e-7);
  }
}

TEST_CASE("pinball prox satisfies its optimality inclusion exactly") {
  SplitMix64 g(14);
  for (int it = 0; it < 10000; ++it) {
    const double tau = 0.02 + 0.96 * g.uniform01();
    const double c = 0.05 + 4.0 * g.uniform01();
    const double xi = 12.0 * g.uniform01() - 6.0;
    const double u = pinball_prox(xi, QuantileLevel(tau), c);
    // 0 in c * subdiff(u) + (u - xi)
    const Interval sub = pinball_subdiff(u, QuantileLevel(tau));
    const Interval shifted(c * sub.lo + (u - xi), c * sub.hi + (u - xi));
    CHECK(shifted.distance(0.0) <= 1e-12);
  }
}

TEST_CASE("prox branches agree at their boundaries") {
  for (double tau : {0.25, 0.5, 0.75}) {
    for (double c : {0.5, 1.0, 2.0}) {
      const QuantileLevel q(tau);
      const double hi = tau * c, lo = (tau - 1.0) * c;
      CHECK(pinball_prox(hi, q, c) == 0.0);       // xi - tau*c == 0 on both branches
      CHECK(pinball_prox(lo, q, c) == 0.0);
      CHECK(pinball_prox(std::nextafter(hi, 1e9), q, c) > 0.0);
      CHECK(pinball_prox(std::nextafter(lo, -1e9), q, c) < 0.0);
    }
  }
}

TEST_CASE("soft threshold examples and minimality") {
  const Vector a = soft_threshold(Vector{2.0, -0.5, 0.0}, 1.0);
  CHECK(a == Vector{1.0, 0.0, 0.0});
  const Vector b = soft_threshold(Vector{-3.0}, 1.5);
  CHECK(b == Vector{-1.5});
  SplitMix64 g(15);
  const Vector x = test::random_vector(g, 8, -2.0, 2.0);
  CHECK(soft_threshold(x, 0.0) == x);
  CHECK_THROWS_AS(soft_threshold(x, -0.1), std::invalid_argument);

  // exact minimizer: single-coordinate perturbations never help
  auto objective = [](const Vector& u, const Vector& xv, double t) {
    double f = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      f += t * std::fabs(u[i]) + 0.5 * (u[i] - xv[i]) * (u[i] - xv[i]);
    return f;
  };
  for (int it = 0; it < 10000; ++it) {
    const double t = 2.0 * g.uniform01();
    const Vector xv = test::random_vector(g, 4, -3.0, 3.0);
    Vector u = soft_threshold(xv, t);
    const double base = objective(u, xv, t);
    const std::size_t i = static_cast<std::size_t>(g.next() % u.size());
    const double delta = g.uniform01() < 0.5 ? 1e-4 : -1e-4;
    u[i] += delta;
    CHECK(objective(u, xv, t) >= base - 1e-15);
  }
}

TEST_CASE("l1 subdifferential membership") {
  const double lam = 2.0;
  CHECK(l1_subdiff_member(Vector{1.0, 0.0}, Vector{lam, 0.5 * lam}, lam, 0.0));
  CHECK_FALSE(l1_subdiff_member(Vector{0.0}, Vector{1.1 * lam}, lam, 0.0));
  CHECK(l1_subdiff_member(Vector{-2.0}, Vector{-lam}, lam, 0.0));
  CHECK_THROWS_AS(l1_subdiff_member(Vector{1.0}, Vector{1.0, 2.0}, lam, 0.0),
                  std::invalid_argument);
}

TEST_CASE("interval invariants") {
  CHECK_THROWS_AS(Interval(1.0, 0.0), std::invalid_argument);
  const Interval iv(-1.0, 2.0);
  CHECK(iv.contains(0.0));
  CHECK(iv.contains(-1.0));
  CHECK(!iv.contains(2.5));
  CHECK(iv.contains(2.5, 0.5));
  CHECK(iv.distance(3.0) == 1.0);
  CHECK(iv.distance(-4.0) == 3.0);
  CHECK(iv.distance(1.0) == 0.0);
}
