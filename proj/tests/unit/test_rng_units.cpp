#include <cmath>
#include <numbers>

#include "doctest.h"
#include "focksim/errors.hpp"
#include "focksim/rng.hpp"
#include "focksim/stats.hpp"
#include "focksim/units.hpp"

using namespace focksim;

TEST_CASE("counter stream is reproducible and order-independent") {
  RandomStream a = RandomStream::derive(42, 3, 7);
  RandomStream b = RandomStream::derive(42, 3, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomStream c = RandomStream::derive(42, 3, 8);
  CHECK(RandomStream::derive(42, 3, 7).next_u64() != c.next_u64());
}

TEST_CASE("uniform stays in [0,1) and has sane mean") {
  RandomStream rng(123);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.02);
}

TEST_CASE("normal uses two uniforms and matches moments loosely") {
  RandomStream rng(9);
  const std::uint64_t before = rng.draws();
  (void)rng.normal(0.0, 1.0);
  CHECK(rng.draws() - before == 2);

  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(1.0, 2.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 1.0) < 0.08);
  CHECK(std::abs(sq / n - mean * mean - 4.0) < 0.3);
}

TEST_CASE("poisson mean tracks mu") {
  RandomStream rng(77);
  double sum = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) sum += rng.poisson(0.5);
  CHECK(std::abs(sum / n - 0.5) < 0.02);
}

TEST_CASE("wilson interval basics") {
  const Interval iv = wilson_interval(50, 100);
  CHECK(iv.lo < 0.5);
  CHECK(iv.hi > 0.5);
  CHECK(wilson_interval(0, 100).lo == doctest::Approx(0.0));
  CHECK(wilson_interval(100, 100).hi == doctest::Approx(1.0));
  CHECK(wilson_interval(0, 0).contains(0.3));
}

TEST_CASE("quantity parsing covers the unit families") {
  CHECK(parse_quantity("3 dB", UnitKind::kLossDb, "t") == doctest::Approx(3.0));
  CHECK(parse_quantity("10 ps", UnitKind::kTime, "t") == doctest::Approx(1e-11));
  CHECK(parse_quantity("1.5", UnitKind::kTime, "t") == doctest::Approx(1.5));
  CHECK(parse_quantity("90 deg", UnitKind::kAngle, "t") ==
        doctest::Approx(std::numbers::pi / 2));
  CHECK(parse_quantity("65 GHz", UnitKind::kAngularFrequency, "t") ==
        doctest::Approx(2.0 * std::numbers::pi * 65e9));
  CHECK(parse_quantity("65 G", UnitKind::kAngularFrequency, "t") ==
        doctest::Approx(65e9));
  CHECK(parse_quantity("0.41 Trad/s", UnitKind::kAngularFrequency, "t") ==
        doctest::Approx(0.41e12));
  CHECK(parse_quantity("0.2 dB/km", UnitKind::kLossDbPerKm, "t") ==
        doctest::Approx(0.2));
  CHECK(parse_quantity("4.9 us/km", UnitKind::kTimePerKm, "t") ==
        doctest::Approx(4.9e-6));
  CHECK(parse_quantity("500 m", UnitKind::kLengthKm, "t") == doctest::Approx(0.5));
  CHECK(parse_quantity("1 kHz", UnitKind::kRate, "t") == doctest::Approx(1e3));

  CHECK_THROWS_AS(parse_quantity("3 volts", UnitKind::kLossDb, "t"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("abc", UnitKind::kTime, "t"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("10 km", UnitKind::kTime, "t"), ConfigError);
}
