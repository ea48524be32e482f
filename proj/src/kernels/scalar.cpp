// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "kernel_impl.hpp"

namespace spreadcert::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void affine_symv(const double* g, std::size_t n, double alpha, const double* x, double beta,
                 const double* b, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = alpha * dot(g + i * n, x, n) + beta * b[i];
  }
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i] - y[i]));
  return m;
}

double edge_energy(const double* g, std::size_t n, const double* re, const double* im) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = g + i * n;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dr = re[i] - re[j];
      double d2 = dr * dr;
      if (im != nullptr) {
        const double di = im[i] - im[j];
        d2 += di * di;
      }
      acc += row[j] * d2;
    }
  }
  return acc;
}

}  // namespace spreadcert::kernels::scalar
