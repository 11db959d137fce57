#include "focksim/fock/permanent.hpp"

#include <stdexcept>
#include <string>

#include "focksim/errors.hpp"
#include "permanent_kernel.hpp"

namespace focksim::fock {
namespace {

using KernelFn = std::complex<double> (*)(const std::complex<double>*, int);

struct Dispatch {
  KernelFn fn;
  PermanentBackend backend;
};

Dispatch resolve() {
#if defined(__x86_64__) || defined(__i386__)
  if (__builtin_cpu_supports("avx2")) {
    return {&detail::permanent_avx2_impl, PermanentBackend::kAvx2};
  }
#elif defined(__aarch64__)
  return {&detail::permanent_neon_impl, PermanentBackend::kNeon};
#endif
  return {&detail::permanent_scalar_impl, PermanentBackend::kScalar};
}

const Dispatch& dispatch() {
  static const Dispatch d = resolve();
  return d;
}

void check_dims(std::span<const std::complex<double>> m, int n) {
  if (n < 0 || m.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("permanent: matrix is not n x n");
  }
  if (n > kMaxPermanentDim) {
    throw CapacityError("permanent: dimension " + std::to_string(n) +
                        " exceeds kernel bound " +
                        std::to_string(kMaxPermanentDim));
  }
}

}  // namespace

const char* permanent_backend_name(PermanentBackend b) {
  switch (b) {
    case PermanentBackend::kScalar: return "scalar";
    case PermanentBackend::kAvx2: return "avx2";
    case PermanentBackend::kNeon: return "neon";
  }
  return "?";
}

PermanentBackend active_permanent_backend() { return dispatch().backend; }

std::vector<PermanentBackend> compiled_permanent_backends() {
  std::vector<PermanentBackend> v{PermanentBackend::kScalar};
#if defined(__x86_64__) || defined(__i386__)
  v.push_back(PermanentBackend::kAvx2);
#endif
#if defined(__aarch64__)
  v.push_back(PermanentBackend::kNeon);
#endif
  return v;
}

std::complex<double> permanent(std::span<const std::complex<double>> m, int n,
                               int cap) {
  check_dims(m, n);
  if (n > cap) {
    throw CapacityError("permanent: dimension " + std::to_string(n) +
                        " exceeds configured cap " + std::to_string(cap));
  }
  // The overwhelmingly common cases in pool evaluations; identical in every
  // backend, so short-circuiting them does not affect determinism.
  if (n == 0) return {1.0, 0.0};
  if (n == 1) return m[0];
  if (n == 2) return m[0] * m[3] + m[1] * m[2];
  return dispatch().fn(m.data(), n);
}

std::complex<double> permanent_with_backend(
    PermanentBackend backend, std::span<const std::complex<double>> m, int n) {
  check_dims(m, n);
  switch (backend) {
    case PermanentBackend::kScalar:
      return detail::permanent_scalar_impl(m.data(), n);
    case PermanentBackend::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      if (__builtin_cpu_supports("avx2")) {
        return detail::permanent_avx2_impl(m.data(), n);
      }
      throw std::invalid_argument("permanent: avx2 not supported by this CPU");
#else
      throw std::invalid_argument("permanent: avx2 backend not compiled in");
#endif
    case PermanentBackend::kNeon:
#if defined(__aarch64__)
      return detail::permanent_neon_impl(m.data(), n);
#else
      throw std::invalid_argument("permanent: neon backend not compiled in");
#endif
  }
  throw std::invalid_argument("permanent: unknown backend");
}

}  // namespace focksim::fock
