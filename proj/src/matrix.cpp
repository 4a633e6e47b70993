#include "qrs/matrix.hpp"

#include <cassert>
#include <cmath>

#include "qrs/kernels.hpp"

namespace qrs {

Matrix Matrix::select_cols(std::span<const std::size_t> keep) const {
  Matrix out(rows_, keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    assert(keep[k] < cols_);
    auto src = col(keep[k]);
    auto dst = out.col(k);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

Vector matvec(const Matrix& x, std::span<const double> beta) {
  assert(beta.size() == x.cols());
  Vector out(x.rows(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j)
    if (beta[j] != 0.0) kernels::axpy(beta[j], x.col(j), out);
  return out;
}

Vector tmatvec(const Matrix& x, std::span<const double> v) {
  assert(v.size() == x.rows());
  Vector out(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) out[j] = kernels::dot(x.col(j), v);
  return out;
}

double spectral_norm_sq(const Matrix& x, int iters) {
  const std::size_t p = x.cols();
  if (p == 0 || x.rows() == 0) return 0.0;

  // Fixed pseudo-random start so the estimate is reproducible.
  Vector v(p);
  std::uint64_t s = 0x9e3779b97f4a7c15ull;
  for (std::size_t j = 0; j < p; ++j) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    v[j] = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
  }

  double est = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = tmatvec(x, matvec(x, v));  // X^T X v
    double nrm = std::sqrt(kernels::nrm2sq(w));
    if (nrm == 0.0) return 0.0;
    est = kernels::dot(v, w) / kernels::nrm2sq(v);
    for (std::size_t j = 0; j < p; ++j) v[j] = w[j] / nrm;
  }
  return est;
}

}  // namespace qrs
