#include "qrs/kernels.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

#include "kernel_table.hpp"

namespace qrs::kernels {
namespace {

bool cpu_has_avx2() {
#if QRS_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &detail::scalar_table();
    case Backend::avx2:
#if QRS_HAVE_AVX2
      return &detail::avx2_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

struct Dispatch {
  Backend backend;
  const Table* table;
  Dispatch() {
    backend = cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
    table = table_for(backend);
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

const Table& table() { return *dispatch().table; }

bool supported(Backend b) {
  if (b == Backend::avx2 && !cpu_has_avx2()) return false;
  return table_for(b) != nullptr;
}

Backend active_backend() { return dispatch().backend; }

void set_backend(Backend b) {
  if (!supported(b))
    throw std::invalid_argument("kernel backend not supported on this CPU: " +
                                std::string(name(b)));
  dispatch().backend = b;
  dispatch().table = table_for(b);
}

std::string_view name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return dispatch().table->dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) {
  return dispatch().table->sum(a.data(), a.size());
}

double nrm2sq(std::span<const double> a) {
  return dispatch().table->nrm2sq(a.data(), a.size());
}

double max_abs(std::span<const double> a) {
  return dispatch().table->max_abs(a.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  dispatch().table->axpy(alpha, x.data(), y.data(), x.size());
}

void soft_threshold(std::span<const double> x, double t, std::span<double> out) {
  assert(x.size() == out.size());
  dispatch().table->soft_threshold(x.data(), t, out.data(), x.size());
}

void soft_threshold(std::span<const double> x, std::span<const double> t,
                    std::span<double> out) {
  assert(x.size() == t.size() && x.size() == out.size());
  dispatch().table->soft_threshold_vec(x.data(), t.data(), out.data(), x.size());
}

void pinball_prox(std::span<const double> v, double lo, double hi,
                  std::span<double> out) {
  assert(v.size() == out.size());
  assert(lo <= 0.0 && hi >= 0.0);
  dispatch().table->pinball_prox(v.data(), lo, hi, out.data(), v.size());
}

}  // namespace qrs::kernels
