// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "kernel_impl.hpp"
#include "spreadcert/kernels.hpp"

namespace spreadcert::kernels {

namespace {

constexpr KernelTable kScalar{
    Isa::scalar, "scalar", &scalar::dot, &scalar::affine_symv, &scalar::max_abs_diff,
    &scalar::edge_energy,
};

#if defined(SPREADCERT_HAVE_AVX2)
constexpr KernelTable kAvx2{
    Isa::avx2, "avx2", &avx2::dot, &avx2::affine_symv, &avx2::max_abs_diff, &avx2::edge_energy,
};
#endif

const KernelTable& resolve() noexcept {
  const char* env = std::getenv("SPREADCERT_ISA");
  if (env != nullptr && std::string_view(env) == "scalar") return kScalar;
  if (const KernelTable* t = avx2_table()) return *t;
  return kScalar;
}

void require_same(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operand length mismatch");
}

}  // namespace

bool cpu_has_avx2_fma() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(SPREADCERT_HAVE_AVX2)
  if (cpu_has_avx2_fma()) return &kAvx2;
#endif
  return nullptr;
}

const KernelTable& active() noexcept {
  static const KernelTable& table = resolve();
  return table;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same(x.size(), y.size());
  return active().dot(x.data(), y.data(), x.size());
}

void affine_symv(std::span<const double> g, std::size_t n, double alpha, std::span<const double> x,
                 double beta, std::span<const double> b, std::span<double> y) {
  require_same(g.size(), n * n);
  require_same(x.size(), n);
  require_same(b.size(), n);
  require_same(y.size(), n);
  active().affine_symv(g.data(), n, alpha, x.data(), beta, b.data(), y.data());
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  require_same(x.size(), y.size());
  return active().max_abs_diff(x.data(), y.data(), x.size());
}

double edge_energy(std::span<const double> g, std::size_t n, std::span<const double> re,
                   std::span<const double> im) {
  require_same(g.size(), n * n);
  require_same(re.size(), n);
  if (!im.empty()) require_same(im.size(), n);
  return active().edge_energy(g.data(), n, re.data(), im.empty() ? nullptr : im.data());
}

}  // namespace spreadcert::kernels
