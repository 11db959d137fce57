// AVX2 variant of the Ryser kernel. Compiled with -mavx2 in its own TU and
// only reached after a runtime CPU check. The row-sum update processes four
// doubles (two complex terms) per instruction; the lane-wise add/sub rounds
// exactly like the scalar loop, so outputs are bit-identical to the scalar
// backend (FMA contraction is disabled for this TU).

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <bit>
#include <cstdint>

#include "permanent_kernel.hpp"

namespace focksim::fock::detail {

std::complex<double> permanent_avx2_impl(const std::complex<double>* m,
                                         int n) {
  if (n == 0) return {1.0, 0.0};
  if (n == 1) return m[0];

  const int stride = padded_len(n);
  alignas(32) double cols[kMaxPermanentDim * kMaxPadded];
  alignas(32) double row[kMaxPadded];
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
      for (int t = 0; t < stride; t += 4) {
        _mm256_store_pd(row + t, _mm256_add_pd(_mm256_load_pd(row + t),
                                               _mm256_load_pd(col + t)));
      }
    } else {
      for (int t = 0; t < stride; t += 4) {
        _mm256_store_pd(row + t, _mm256_sub_pd(_mm256_load_pd(row + t),
                                               _mm256_load_pd(col + t)));
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

#endif  // x86
