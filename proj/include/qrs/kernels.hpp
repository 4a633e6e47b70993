#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Flat-array arithmetic kernels used by the solver and the screening
// geometry. Every kernel has a scalar reference implementation and, on
// x86-64, an AVX2/FMA variant; the active backend is picked at runtime
// from CPU capabilities and can be overridden (tests run both backends
// against each other).
namespace qrs::kernels {

enum class Backend { scalar, avx2 };

bool supported(Backend b);
Backend active_backend();
void set_backend(Backend b);  // throws std::invalid_argument if unsupported
std::string_view name(Backend b);

// Raw entry points of one backend. Hot loops snapshot this once instead
// of paying the dispatch lookup per call.
struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*nrm2sq)(const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*soft_threshold)(const double*, double, double*, std::size_t);
  void (*soft_threshold_vec)(const double*, const double*, double*, std::size_t);
  void (*pinball_prox)(const double*, double, double, double*, std::size_t);
};

const Table& table();  // the active backend's table

// <a, b>
double dot(std::span<const double> a, std::span<const double> b);

// sum_i a_i
double sum(std::span<const double> a);

// <a, a>
double nrm2sq(std::span<const double> a);

// max_i |a_i|, 0 for empty input
double max_abs(std::span<const double> a);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// out_i = sign(x_i) * max(|x_i| - t, 0), sign(0) = 0
void soft_threshold(std::span<const double> x, double t, std::span<double> out);

// per-coordinate thresholds
void soft_threshold(std::span<const double> x, std::span<const double> t,
                    std::span<double> out);

// out_i = v_i - hi if v_i >= hi; v_i - lo if v_i <= lo; 0 otherwise.
// Requires lo <= 0 <= hi (holds for hi = tau*c, lo = (tau-1)*c, c > 0).
void pinball_prox(std::span<const double> v, double lo, double hi,
                  std::span<double> out);

}  // namespace qrs::kernels
