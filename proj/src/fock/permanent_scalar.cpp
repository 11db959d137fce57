#include <bit>
#include <cstdint>

#include "permanent_kernel.hpp"

namespace focksim::fock::detail {

// Ryser with Gray-code subset iteration:
//   perm(A) = (-1)^n * sum_{S nonempty} (-1)^{|S|} prod_i sum_{j in S} A_ij
// Each step toggles one column in the running row sums.
std::complex<double> permanent_scalar_impl(const std::complex<double>* m,
                                           int n) {
  if (n == 0) return {1.0, 0.0};
  if (n == 1) return m[0];

  const int stride = padded_len(n);
  double cols[kMaxPermanentDim * kMaxPadded];
  double row[kMaxPadded];
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
      for (int t = 0; t < stride; ++t) row[t] += col[t];
    } else {
      for (int t = 0; t < stride; ++t) row[t] -= col[t];
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
