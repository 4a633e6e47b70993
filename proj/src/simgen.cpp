#include "qrs/simgen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qrs/kernels.hpp"

namespace qrs {

double SplitMix64::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));  // 1 - u1 in (0, 1]
  const double a = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

double SplitMix64::chi_squared(unsigned df) {
  double acc = 0.0;
  for (unsigned k = 0; k < df; ++k) {
    const double z = normal();
    acc += z * z;
  }
  return acc;
}

double SplitMix64::student_t(unsigned df) {
  const double z = normal();
  return z / std::sqrt(chi_squared(df) / static_cast<double>(df));
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0x6a09e667f3bcc909ull * (stream + 1)));
  return g.next();
}

std::string_view covariance_name(Covariance c) {
  return c == Covariance::identity ? "identity" : "ar1_half";
}

Covariance covariance_from_name(std::string_view name) {
  if (name == "identity") return Covariance::identity;
  if (name == "ar1_half" || name == "ar1") return Covariance::ar1_half;
  throw std::invalid_argument("unknown covariance family: " + std::string(name));
}

Vector true_beta(std::size_t p) {
  static constexpr double head[17] = {2, 0, 1.5, 0, 0, 0.8, 0, 0,   1,
                                      0, 1.75, 0, 0, 0.75, 0, 0, 0.3};
  if (p < 17)
    throw std::invalid_argument("true_beta requires p >= 17 to hold all fixed entries");
  Vector beta(p, 0.0);
  std::copy(std::begin(head), std::end(head), beta.begin());
  return beta;
}

Vector mean_pattern(std::size_t p) {
  Vector mu(p, 0.0);
  auto assign = [&](std::size_t lo1, std::size_t hi1, double value) {
    // 1-based inclusive, silently clipped to the feature count
    for (std::size_t j = lo1; j <= hi1 && j <= p; ++j)
      if (j >= 1) mu[j - 1] = value;
  };
  assign(3, 7, 10.0);
  assign(70, 90, 5.0);
  assign(p / 2, (2 * p) / 3, -2.0);
  return mu;
}

Matrix gen_design(const SimSpec& spec) {
  const std::size_t n = spec.n, p = spec.p;
  Matrix x(n, p);
  const Vector mu = mean_pattern(p);
  SplitMix64 g(derive_stream(spec.seed, 0));
  const double ar_coef = 0.5;
  const double ar_innov = std::sqrt(0.75);

  for (std::size_t i = 0; i < n; ++i) {
    double prev = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double eps = g.normal();
      double z;
      if (spec.covariance == Covariance::identity) {
        z = eps;
      } else {
        z = (j == 0) ? eps : ar_coef * prev + ar_innov * eps;
        prev = z;
      }
      x(i, j) = z + mu[j];
    }
  }
  return x;
}

Vector gen_response(const Matrix& x, std::span<const double> beta_star, unsigned df,
                    std::uint64_t seed) {
  if (df < 1) throw std::invalid_argument("t-noise degrees of freedom must be >= 1");
  if (beta_star.size() != x.cols())
    throw std::invalid_argument("gen_response: beta length does not match X columns");
  Vector y = matvec(x, beta_star);
  SplitMix64 g(derive_stream(seed, 1));
  for (double& v : y) v += g.student_t(df);
  return y;
}

}  // namespace qrs
