#pragma once
#include <complex>
#include <span>
#include <vector>

namespace focksim::fock {

/// Default limit on photons per pool. The permanent kernel is exact and
/// exponential in the photon number, so the cap is deliberate.
inline constexpr int kDefaultPhotonCap = 8;

/// Hard kernel bound (stack buffers, Gray-code word width).
inline constexpr int kMaxPermanentDim = 16;

enum class PermanentBackend { kScalar, kAvx2, kNeon };

const char* permanent_backend_name(PermanentBackend b);

/// Backend selected at startup from CPU capabilities.
PermanentBackend active_permanent_backend();

/// Backends compiled into this binary (runtime support not implied).
std::vector<PermanentBackend> compiled_permanent_backends();

/// Exact permanent of a row-major n x n complex matrix via Ryser's formula
/// with Gray-code subset iteration. All backends perform the identical
/// sequence of IEEE operations, so results are bit-identical regardless of
/// dispatch. Throws CapacityError when n exceeds `cap`.
std::complex<double> permanent(std::span<const std::complex<double>> m, int n,
                               int cap = kDefaultPhotonCap);

/// Runs a specific backend; for equivalence tests. Throws
/// std::invalid_argument if the backend is not compiled in or not
/// supported by the CPU.
std::complex<double> permanent_with_backend(PermanentBackend backend,
                                            std::span<const std::complex<double>> m,
                                            int n);

}  // namespace focksim::fock
