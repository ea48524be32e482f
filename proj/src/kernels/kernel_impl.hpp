// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace spreadcert::kernels {

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void affine_symv(const double* g, std::size_t n, double alpha, const double* x, double beta,
                 const double* b, double* y);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double edge_energy(const double* g, std::size_t n, const double* re, const double* im);
}  // namespace scalar

#if defined(SPREADCERT_HAVE_AVX2)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void affine_symv(const double* g, std::size_t n, double alpha, const double* x, double beta,
                 const double* b, double* y);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double edge_energy(const double* g, std::size_t n, const double* re, const double* im);
}  // namespace avx2
#endif

}  // namespace spreadcert::kernels
