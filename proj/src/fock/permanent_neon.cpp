// NEON variant of the Ryser kernel (aarch64, where NEON is baseline).
// Two doubles (one complex term) per instruction; same structure and same
// rounding as the scalar backend.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <bit>
#include <cstdint>

#include "permanent_kernel.hpp"

namespace focksim::fock::detail {

std::complex<double> permanent_neon_impl(const std::complex<double>* m,
                                         int n) {
  if (n == 0) return {1.0, 0.0};
  if (n == 1) return m[0];

  const int stride = padded_len(n);
  alignas(16) double cols[kMaxPermanentDim * kMaxPadded];
  alignas(16) double row[kMaxPadded];
  fill_columns(m, n, cols, stride);
  for (int t = 0; t < stride; ++t) row[t] = 0.0;

  double acc_re = 0.0;
  double acc_im = 0.0;
  std::uint64_t gray = 0;
  int parity = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int j = std::countr_zero(k);
    const std::uint64_t bit = std::uint64_t{1} << j;
    gray ^= bit;
    parity ^= 1;
    const double* col = cols + static_cast<std::size_t>(j) * stride;
    if (gray & bit) {
      for (int t = 0; t < stride; t += 2) {
        vst1q_f64(row + t, vaddq_f64(vld1q_f64(row + t), vld1q_f64(col + t)));
      }
    } else {
      for (int t = 0; t < stride; t += 2) {
        vst1q_f64(row + t, vsubq_f64(vld1q_f64(row + t), vld1q_f64(col + t)));
      }
    }
    const std::complex<double> prod = rowsum_product(row, n);
    if (parity) {
      acc_re -= prod.real();
      acc_im -= prod.imag();
    } else {
      acc_re += prod.real();
      acc_im += prod.imag();
    }
  }
  if (n & 1) {
    acc_re = -acc_re;
    acc_im = -acc_im;
  }
  return {acc_re, acc_im};
}

}  // namespace focksim::fock::detail

#endif  // aarch64
