#pragma once

#include <cstdint>
#include <string_view>

#include "qrs/matrix.hpp"

namespace qrs {

// Counter-based stream generator (splitmix64 finalizer over an additive
// counter). One instance per (seed, stream) is the determinism unit: the
// draw sequence is bit-exact across runs and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // standard normal, Box-Muller (deterministic, no rejection)
  double normal();

  // chi-square with df degrees of freedom (sum of df squared normals)
  double chi_squared(unsigned df);

  // Student t with df degrees of freedom
  double student_t(unsigned df);

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Distinct deterministic sub-stream seeds from one user seed.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream);

inline constexpr std::string_view kRngName = "splitmix64";

enum class Covariance { identity, ar1_half };

std::string_view covariance_name(Covariance c);
Covariance covariance_from_name(std::string_view name);  // throws on unknown

struct SimSpec {
  std::size_t n = 100;
  std::size_t p = 2000;
  Covariance covariance = Covariance::identity;
  std::uint64_t seed = 0;
  unsigned df = 4;  // t-noise degrees of freedom
};

// The fixed sparse coefficient vector: 17 leading entries
// (2,0,1.5,0,0,0.8,0,0,1,0,1.75,0,0,0.75,0,0,0.3), zero-padded.
// Requires p >= 17.
Vector true_beta(std::size_t p);

// Mean pattern: entries 3..7 = 10, 70..90 = 5, [p/2]..[2p/3] = -2
// (1-based inclusive, clipped to p, applied in that order), 0 elsewhere.
Vector mean_pattern(std::size_t p);

// Rows i.i.d. N(mu, Sigma); the AR(1) family uses the exact stationary
// recursion z_j = 0.5 z_{j-1} + sqrt(0.75) eps_j.
Matrix gen_design(const SimSpec& spec);

// y = X beta_star + eps, eps_i i.i.d. t(df).
Vector gen_response(const Matrix& x, std::span<const double> beta_star, unsigned df,
                    std::uint64_t seed);

}  // namespace qrs
