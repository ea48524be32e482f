// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense inner loops used by the diffusion iteration and the energy checks.
//
// Every kernel has a scalar reference implementation; an AVX2/FMA variant is
// compiled separately and picked at runtime when the CPU supports it. The
// variants must agree with the reference up to floating-point reassociation.
// Set SPREADCERT_ISA=scalar in the environment to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace spreadcert::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  double (*dot)(const double* x, const double* y, std::size_t n);

  // y = alpha * G x + beta * b, G symmetric n x n stored contiguously
  // (row i of G == column i).
  void (*affine_symv)(const double* g, std::size_t n, double alpha, const double* x, double beta,
                      const double* b, double* y);

  double (*max_abs_diff)(const double* x, const double* y, std::size_t n);

  // sum_{i<j} G_ij * ((re_i - re_j)^2 + (im_i - im_j)^2); im may be null.
  double (*edge_energy)(const double* g, std::size_t n, const double* re, const double* im);
};

const KernelTable& scalar_table() noexcept;

/// Null when the variant was not compiled in or the CPU lacks the extension.
const KernelTable* avx2_table() noexcept;

/// Best table for this CPU, honouring SPREADCERT_ISA. Resolved once.
const KernelTable& active() noexcept;

bool cpu_has_avx2_fma() noexcept;

// Span front-ends over the active table.

double dot(std::span<const double> x, std::span<const double> y);

void affine_symv(std::span<const double> g, std::size_t n, double alpha, std::span<const double> x,
                 double beta, std::span<const double> b, std::span<double> y);

double max_abs_diff(std::span<const double> x, std::span<const double> y);

double edge_energy(std::span<const double> g, std::size_t n, std::span<const double> re,
                   std::span<const double> im = {});

}  // namespace spreadcert::kernels
