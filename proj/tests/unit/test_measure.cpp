#include <cmath>
#include <map>

#include "doctest.h"
#include "focksim/components/components.hpp"
#include "focksim/errors.hpp"
#include "focksim/fock/pool_ops.hpp"
#include "focksim/quantum/measure.hpp"
#include "focksim/rng.hpp"

using namespace focksim;
using fock::Photon;
using fock::PhotonPool;
using fock::PhotonState;
using fock::RouteId;

namespace {

PhotonState basic_state(std::uint32_t route, double coeff, double phase = 0.0) {
  PhotonState s;
  s.route = {route};
  s.coefficient = coeff;
  s.phase = phase;
  return s;
}

PhotonPool hom_pool(double pol_angle = 0.0) {
  const double r = 1.0 / std::sqrt(2.0);
  PhotonPool pool;
  pool.pool_id = 1;
  Photon p1;
  p1.states = {basic_state(2, r), basic_state(3, -r)};
  Photon p2;
  p2.states = {basic_state(2, r), basic_state(3, r)};
  for (PhotonState& s : p2.states) {
    s.polarization = {std::cos(pol_angle), std::sin(pol_angle), 0.0};
  }
  pool.photons = {p1, p2};
  return pool;
}

}  // namespace

TEST_CASE("HOM number distribution: bunching vs distinguishable") {
  const quantum::NumberDistribution indist =
      quantum::route_number_distribution(hom_pool(0.0), {2});
  REQUIRE(indist.probabilities.size() == 3);
  CHECK(indist.probabilities[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(indist.probabilities[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(indist.probabilities[2] == doctest::Approx(0.5).epsilon(1e-9));

  const quantum::NumberDistribution dist = quantum::route_number_distribution(
      hom_pool(std::numbers::pi / 2), {2});
  CHECK(dist.probabilities[0] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(dist.probabilities[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(dist.probabilities[2] == doctest::Approx(0.25).epsilon(1e-9));

  // Intermediate angle reproduces the sin^2/2 coincidence term.
  const double angle = 0.7;
  const quantum::NumberDistribution mid =
      quantum::route_number_distribution(hom_pool(angle), {2});
  CHECK(mid.probabilities[1] ==
        doctest::Approx(0.5 * std::sin(angle) * std::sin(angle)).epsilon(1e-9));
}

TEST_CASE("single split photon has p1 = T on the transmitted route") {
  PhotonPool pool;
  pool.pool_id = 1;
  pool.photons = {Photon{{basic_state(0, 1.0)}}};
  components::BsParams bs;
  bs.in_a = {0};
  bs.in_b = {1};
  bs.out_c = {2};
  bs.out_d = {3};
  const PhotonPool split = components::apply_bs(pool, bs);
  const quantum::NumberDistribution dist =
      quantum::route_number_distribution(split, {2});
  CHECK(dist.probabilities[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("sample_count follows the distribution") {
  RandomStream rng(8);
  quantum::NumberDistribution sure{{0}, {1.0, 0.0, 0.0}};
  quantum::NumberDistribution one{{0}, {0.0, 1.0}};
  for (int i = 0; i < 50; ++i) {
    CHECK(quantum::sample_count(sure, rng) == 0);
    CHECK(quantum::sample_count(one, rng) == 1);
  }

  quantum::NumberDistribution half{{0}, {0.5, 0.0, 0.5}};
  const int n = 100000;
  std::map<int, int> freq;
  for (int i = 0; i < n; ++i) ++freq[quantum::sample_count(half, rng)];
  const double bound = 4.0 * std::sqrt(0.25 / n);
  CHECK(std::abs(freq[0] / double(n) - 0.5) < bound);
  CHECK(freq[1] == 0);
  CHECK(std::abs(freq[2] / double(n) - 0.5) < bound);

  quantum::NumberDistribution empty{{0}, {}};
  CHECK_THROWS_AS(quantum::sample_count(empty, rng), std::invalid_argument);
}

TEST_CASE("collapse: full detection, partial survival, renormalization") {
  RandomStream rng(11);

  PhotonPool single;
  single.pool_id = 1;
  single.photons = {Photon{{basic_state(0, 1.0)}}};
  const quantum::CollapseOutcome all = quantum::collapse(single, {0}, 1, rng);
  CHECK(all.surviving_pool.photons.empty());
  CHECK(all.removed_photon_indices == std::vector<int>{0});

  // HOM k = 0: both photons survive with only d-path states, renormalized.
  const quantum::CollapseOutcome none = quantum::collapse(hom_pool(), {2}, 0, rng);
  REQUIRE(none.surviving_pool.photons.size() == 2);
  for (const Photon& ph : none.surviving_pool.photons) {
    for (const PhotonState& s : ph.states) CHECK(s.route.value == 3);
  }
  CHECK(fock::pool_norm(none.surviving_pool) ==
        doctest::Approx(1.0).epsilon(1e-9));

  const quantum::CollapseOutcome both = quantum::collapse(hom_pool(), {2}, 2, rng);
  CHECK(both.surviving_pool.photons.empty());

  // HOM k = 1: exactly one photon survives, fully on route d, normalized.
  const quantum::CollapseOutcome onec =
      quantum::collapse(hom_pool(std::numbers::pi / 2), {2}, 1, rng);
  REQUIRE(onec.surviving_pool.photons.size() == 1);
  CHECK(fock::pool_norm(onec.surviving_pool) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("collapse carries the loss deficit through the k=0 branch") {
  // A photon split over two routes with 3 dB of loss on each: after a
  // no-detection on route 0 the conditional probability of finding it on
  // route 1 must be p1 / (1 - p0), not 1.
  PhotonPool pool;
  pool.pool_id = 1;
  const double g = std::sqrt(0.25);  // amplitude per route, total norm 0.5
  pool.photons = {Photon{{basic_state(0, g), basic_state(1, g)}}};
  RandomStream rng(5);
  const quantum::CollapseOutcome out = quantum::collapse(pool, {0}, 0, rng);
  REQUIRE(out.surviving_pool.photons.size() == 1);
  const quantum::NumberDistribution dist =
      quantum::route_number_distribution(out.surviving_pool, {1});
  CHECK(dist.probabilities[1] == doctest::Approx(0.25 / 0.75).epsilon(1e-9));
}

TEST_CASE("degenerate conditioning raises") {
  RandomStream rng(6);
  PhotonPool single;
  single.pool_id = 1;
  single.photons = {Photon{{basic_state(0, 1.0)}}};
  // k = 0 on the photon's only route: no support.
  CHECK_THROWS_AS((void)quantum::collapse(single, {0}, 0, rng),
                  DegenerateStateError);
}

TEST_CASE("no-signaling: phase on a disjoint route leaves the distribution") {
  PhotonPool pool;
  pool.pool_id = 1;
  pool.photons = {
      Photon{{basic_state(2, std::sqrt(0.5)), basic_state(3, -std::sqrt(0.5))}}};

  const quantum::NumberDistribution before =
      quantum::route_number_distribution(pool, {2});
  components::PhaseModulatorParams pm;
  pm.target_phase = 1.234;
  pm.in = {3};
  pm.out = {3};
  const PhotonPool shifted = components::apply_phase_modulator(pool, pm);
  const quantum::NumberDistribution after =
      quantum::route_number_distribution(shifted, {2});
  for (std::size_t k = 0; k < before.probabilities.size(); ++k) {
    CHECK(after.probabilities[k] ==
          doctest::Approx(before.probabilities[k]).epsilon(1e-9));
  }
}

TEST_CASE("sequential measurement matches the four-term expansion") {
  // Measuring route c then route d on the HOM pool. For relative pol angle
  // theta: P(2,0) = P(0,2) = (1 + cos^2)/4 and P(1,1) = sin^2/2, from
  // expanding the two-photon output state term by term.
  const double angle = 0.9;
  const double c2 = std::cos(angle) * std::cos(angle);
  const double p20 = (1.0 + c2) / 4.0;
  const double p11 = (1.0 - c2) / 2.0;

  RandomStream rng(2718);
  std::map<std::pair<int, int>, int> joint;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    PhotonPool pool = hom_pool(angle);
    const quantum::NumberDistribution dc =
        quantum::route_number_distribution(pool, {2});
    const int kc = quantum::sample_count(dc, rng);
    const quantum::CollapseOutcome out = quantum::collapse(pool, {2}, kc, rng);
    int kd = 0;
    if (!out.surviving_pool.photons.empty()) {
      const quantum::NumberDistribution dd =
          quantum::route_number_distribution(out.surviving_pool, {3});
      kd = quantum::sample_count(dd, rng);
    }
    ++joint[{kc, kd}];
  }
  const auto bound = [&](double p) { return 4.0 * std::sqrt(p * (1 - p) / n); };
  CHECK(std::abs(joint[{2, 0}] / double(n) - p20) < bound(p20));
  CHECK(std::abs(joint[{0, 2}] / double(n) - p20) < bound(p20));
  CHECK(std::abs(joint[{1, 1}] / double(n) - p11) < bound(p11));
}

TEST_CASE("marginal consistency on random pools") {
  RandomStream rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    PhotonPool pool;
    pool.pool_id = 1;
    const int n_photons = 1 + static_cast<int>(rng.uniform() * 3);
    for (int p = 0; p < n_photons; ++p) {
      Photon ph;
      const int n_states = 1 + static_cast<int>(rng.uniform() * 2);
      for (int s = 0; s < n_states; ++s) {
        PhotonState st =
            basic_state(static_cast<std::uint32_t>(rng.uniform() * 3),
                        rng.uniform(0.2, 0.9), rng.uniform(0.0, 6.28));
        st.delay = rng.uniform(-5e-12, 5e-12);
        ph.states.push_back(st);
      }
      fock::merge_duplicate_states(ph);
      if (ph.states.empty()) ph.states.push_back(basic_state(0, 0.5));
      pool.photons.push_back(ph);
    }
    pool = fock::normalize_pool(pool);

    const RouteId route{1};
    const quantum::NumberDistribution dist =
        quantum::route_number_distribution(pool, route);
    double mean = 0.0;
    int photons_on_route = 0;
    for (const Photon& ph : pool.photons) {
      for (const PhotonState& s : ph.states) {
        if (s.route == route) {
          ++photons_on_route;
          break;
        }
      }
    }
    for (std::size_t k = 0; k < dist.probabilities.size(); ++k) {
      mean += k * dist.probabilities[k];
      if (static_cast<int>(k) > photons_on_route) {
        CHECK(dist.probabilities[k] == doctest::Approx(0.0).epsilon(1e-9));
      }
    }
    CHECK(mean <= n_photons + 1e-9);
  }
}

TEST_CASE("merge keeps marginals on untouched routes") {
  fock::PoolIdAllocator ids{50};
  PhotonPool a;
  a.pool_id = 1;
  a.photons = {
      Photon{{basic_state(0, std::sqrt(0.5)), basic_state(1, std::sqrt(0.5))}}};
  PhotonPool b;
  b.pool_id = 2;
  b.photons = {Photon{{basic_state(5, 1.0)}}};

  const quantum::NumberDistribution before =
      quantum::route_number_distribution(a, {0});
  const PhotonPool merged = quantum::merge_pools(a, b, ids);
  const quantum::NumberDistribution after =
      quantum::route_number_distribution(merged, {0});
  REQUIRE(after.probabilities.size() == 3);
  CHECK(after.probabilities[0] ==
        doctest::Approx(before.probabilities[0]).epsilon(1e-9));
  CHECK(after.probabilities[1] ==
        doctest::Approx(before.probabilities[1]).epsilon(1e-9));
  CHECK(after.probabilities[2] == doctest::Approx(0.0));
}
