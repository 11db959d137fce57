#include <complex>
#include <vector>

#include "doctest.h"
#include "focksim/errors.hpp"
#include "focksim/fock/permanent.hpp"
#include "focksim/rng.hpp"
#include "support/oracles.hpp"

using namespace focksim;
using fock::PermanentBackend;

namespace {

std::vector<std::complex<double>> random_matrix(RandomStream& rng, int n) {
  std::vector<std::complex<double>> m(static_cast<std::size_t>(n) * n);
  for (auto& x : m) x = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return m;
}

}  // namespace

TEST_CASE("permanent closed forms") {
  const std::vector<std::complex<double>> id2 = {1, 0, 0, 1};
  CHECK(fock::permanent(id2, 2) == std::complex<double>(1.0, 0.0));

  const std::complex<double> a{1.5, 0.2}, b{-0.3, 1.0}, c{0.7, -0.1}, d{2.0, 0.5};
  const std::vector<std::complex<double>> m = {a, b, c, d};
  CHECK(std::abs(fock::permanent(m, 2) - (a * d + b * c)) < 1e-15);

  CHECK(fock::permanent({}, 0) == std::complex<double>(1.0, 0.0));
  const std::vector<std::complex<double>> one = {{3.0, -2.0}};
  CHECK(fock::permanent(one, 1) == one[0]);
}

TEST_CASE("Ryser equals the naive permutation sum for n <= 4") {
  RandomStream rng(31337);
  for (int n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto m = random_matrix(rng, n);
      const std::complex<double> ryser = fock::permanent(m, n);
      const std::complex<double> naive = testing::naive_permanent(m, n);
      CHECK(std::abs(ryser - naive) <= 1e-12 * std::max(1.0, std::abs(naive)));
    }
  }
}

TEST_CASE("capacity errors name the cap") {
  RandomStream rng(1);
  const auto m = random_matrix(rng, 9);
  CHECK_THROWS_AS((void)fock::permanent(m, 9), CapacityError);
  CHECK_THROWS_AS((void)fock::permanent(m, 9, 8), CapacityError);
  CHECK_NOTHROW((void)fock::permanent(m, 9, 12));
  CHECK_THROWS_AS((void)fock::permanent(random_matrix(rng, 17), 17, 20),
                  CapacityError);
  CHECK_THROWS_AS((void)fock::permanent(m, 4), std::invalid_argument);
}

TEST_CASE("SIMD backends are bit-identical to the scalar kernel") {
  RandomStream rng(777);
  const PermanentBackend active = fock::active_permanent_backend();
  INFO("active backend: " << fock::permanent_backend_name(active));
  int exercised = 0;
  for (int n = 3; n <= 10; ++n) {
    for (int rep = 0; rep < 25; ++rep) {
      const auto m = random_matrix(rng, n);
      const std::complex<double> scalar =
          fock::permanent_with_backend(PermanentBackend::kScalar, m, n);
      for (PermanentBackend backend : fock::compiled_permanent_backends()) {
        if (backend == PermanentBackend::kScalar) continue;
        std::complex<double> v;
        try {
          v = fock::permanent_with_backend(backend, m, n);
        } catch (const std::invalid_argument&) {
          continue;  // compiled in but not supported by this CPU
        }
        ++exercised;
        CHECK(v.real() == scalar.real());
        CHECK(v.imag() == scalar.imag());
      }
      // public dispatch agrees with the scalar kernel bit for bit
      const std::complex<double> dispatched = fock::permanent(m, n, 12);
      CHECK(dispatched.real() == scalar.real());
      CHECK(dispatched.imag() == scalar.imag());
    }
  }
  if (active != PermanentBackend::kScalar) CHECK(exercised > 0);
}
