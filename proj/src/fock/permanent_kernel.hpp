#pragma once
#include <complex>

#include "focksim/fock/permanent.hpp"

// Shared pieces of the Ryser kernels. Each backend implements the same
// Gray-code loop; only the row-sum update (the O(2^n * n) part) is
// vectorized. The running product over row sums stays scalar in every
// backend so that all backends execute the identical IEEE operation
// sequence and return bit-identical results.

namespace focksim::fock::detail {

// Row sums and columns are interleaved (re, im) pairs, padded with zeros to
// a multiple of four doubles so vector lanes never read past the data.
constexpr int padded_len(int n) { return ((2 * n + 3) / 4) * 4; }

inline constexpr int kMaxPadded = padded_len(kMaxPermanentDim);

inline void fill_columns(const std::complex<double>* m, int n, double* cols,
                         int stride) {
  for (int j = 0; j < n; ++j) {
    double* c = cols + static_cast<std::size_t>(j) * stride;
    for (int i = 0; i < n; ++i) {
      c[2 * i] = m[i * n + j].real();
      c[2 * i + 1] = m[i * n + j].imag();
    }
    for (int t = 2 * n; t < stride; ++t) c[t] = 0.0;
  }
}

inline std::complex<double> rowsum_product(const double* row, int n) {
  double pr = row[0];
  double pi = row[1];
  for (int i = 1; i < n; ++i) {
    const double re = pr * row[2 * i] - pi * row[2 * i + 1];
    pi = pr * row[2 * i + 1] + pi * row[2 * i];
    pr = re;
  }
  return {pr, pi};
}

std::complex<double> permanent_scalar_impl(const std::complex<double>* m, int n);

#if defined(__x86_64__) || defined(__i386__)
std::complex<double> permanent_avx2_impl(const std::complex<double>* m, int n);
#endif

#if defined(__aarch64__)
std::complex<double> permanent_neon_impl(const std::complex<double>* m, int n);
#endif

}  // namespace focksim::fock::detail
