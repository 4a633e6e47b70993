#include <cmath>
#include <cstddef>

#include "kernel_table.hpp"

namespace qrs::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double nrm2sq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double max_abs_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void soft_threshold_scalar(const double* x, double t, double* out,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::fabs(x[i]) - t;
    out[i] = m > 0.0 ? (x[i] > 0.0 ? m : -m) : 0.0;
  }
}

void soft_threshold_vec_scalar(const double* x, const double* t, double* out,
                               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::fabs(x[i]) - t[i];
    out[i] = m > 0.0 ? (x[i] > 0.0 ? m : -m) : 0.0;
  }
}

void pinball_prox_scalar(const double* v, double lo, double hi, double* out,
                         std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] >= hi)
      out[i] = v[i] - hi;
    else if (v[i] <= lo)
      out[i] = v[i] - lo;
    else
      out[i] = 0.0;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table table = {
      dot_scalar,           sum_scalar,
      nrm2sq_scalar,        max_abs_scalar,
      axpy_scalar,          soft_threshold_scalar,
      soft_threshold_vec_scalar, pinball_prox_scalar,
  };
  return table;
}

}  // namespace qrs::kernels::detail
