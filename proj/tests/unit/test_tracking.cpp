#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "test_support.hpp"
#include "wxr/error.hpp"
#include "wxr/forecast.hpp"
#include "wxr/synthetic.hpp"
#include "wxr/tracking.hpp"

using namespace wxr;

namespace {

FieldSet gaussian_low(const GridSpec& g, LatLon center, TimePoint t = test::t0()) {
  const auto msl = msl_channel();
  return test::make_fieldset(g, t, [&](std::size_t c, std::size_t i, std::size_t j) {
    if (c != msl) return 0.0f;
    const double dlat = g.lat_of(i) - center.lat;
    double dlon = g.lon_of(j) - center.lon;
    dlon -= 360.0 * std::round(dlon / 360.0);
    return static_cast<float>(101325.0 - 4000.0 * std::exp(-(dlat * dlat + dlon * dlon) / 18.0));
  });
}

Trajectory straight_track(LatLon start, double dlat, double dlon, std::size_t n) {
  Trajectory t;
  for (std::size_t k = 0; k < n; ++k) {
    t.push_back({test::t0() + static_cast<int>(k) * kModelTimestep, start.lat + dlat * k, start.lon + dlon * k});
  }
  return t;
}

}  // namespace

TEST_CASE("locates a Gaussian depression") {
  const auto g = GridSpec::one_degree();
  const auto c = locate_center(gaussian_low(g, {33.0, 285.0}), TrackConfig{});
  CHECK(c.lat == 33.0);
  CHECK(c.lon == 285.0);

  const auto q = GridSpec::quarter_degree();
  const auto cq = locate_center(gaussian_low(q, {35.25, 280.75}), TrackConfig{});
  CHECK(cq.lat == 35.25);
  CHECK(cq.lon == 280.75);
}

TEST_CASE("deeper minimum outside the region is ignored") {
  const auto g = GridSpec::one_degree();
  const auto msl = msl_channel();
  const auto base = gaussian_low(g, {33.0, 285.0});
  const auto fs = test::modify(base, [&](std::size_t c, std::size_t i, std::size_t j, float v) {
    return c == msl && i == 90 && j == 10 ? 90000.0f : v;
  });
  CHECK(locate_center(fs, TrackConfig{}) == LatLon{33.0, 285.0});
  CHECK(locate_center(fs, TrackConfig{Region::globe(), std::nullopt}) == LatLon{0.0, 10.0});
}

TEST_CASE("ties resolve to the first point in row-major order") {
  const auto g = GridSpec::one_degree();
  const auto msl = msl_channel();
  const auto fs = test::make_fieldset(g, test::t0(), [&](std::size_t c, std::size_t i, std::size_t j) {
    if (c != msl) return 0.0f;
    // Minima at (35N, 280E), (35N, 285E) and (32N, 275E)
    if ((i == 55 && (j == 280 || j == 285)) || (i == 58 && j == 275)) return 99000.0f;
    return 101000.0f;
  });
  CHECK(locate_center(fs, TrackConfig{}) == LatLon{35.0, 280.0});

  const auto flat = FieldSet::filled(g, test::t0(), 101325.0f);
  CHECK(locate_center(flat, TrackConfig{}) == LatLon{40.0, 270.0});
}

TEST_CASE("continuity radius restricts candidates") {
  const auto g = GridSpec::one_degree();
  const auto msl = msl_channel();
  // Deep low far east, shallow low near the prior position.
  const auto fs = test::make_fieldset(g, test::t0(), [&](std::size_t c, std::size_t i, std::size_t j) {
    if (c != msl) return 0.0f;
    if (i == 55 && j == 288) return 97000.0f;
    if (i == 57 && j == 272) return 99000.0f;
    return 101000.0f;
  });
  TrackConfig cfg;
  cfg.continuity_radius_km = 500.0;
  const LatLon prior{33.0, 271.0};
  CHECK(locate_center(fs, cfg) == LatLon{35.0, 288.0});
  CHECK(locate_center(fs, cfg, prior) == LatLon{33.0, 272.0});
  const auto want = oracle::masked_argmin(fs, 30, 40, 270, 290, prior, 500.0);
  REQUIRE(want);
  CHECK(locate_center(fs, cfg, prior) == *want);

  cfg.continuity_radius_km = 1.0;
  try {
    locate_center(fs, cfg, LatLon{0.0, 0.0});
    FAIL("expected no candidates");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoCandidatePoints);
  }
}

TEST_CASE("tracker agrees with the exhaustive oracle on random fields") {
  const GridSpec g(2'000'000, 91, 180);
  const auto msl = msl_channel();
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CounterRng rng(seed);
    // Quantized values force frequent ties.
    const auto fs = test::make_fieldset(g, test::t0(), [&](std::size_t c, auto, auto) {
      return c == msl ? 100000.0f + 100.0f * static_cast<float>(rng() % 8) : 0.0f;
    });
    const auto got = locate_center(fs, TrackConfig{});
    const auto want = oracle::masked_argmin(fs, 30, 40, 270, 290);
    REQUIRE(want);
    CHECK(got == *want);
  }
}

TEST_CASE("stationary and advected storms") {
  const auto g = GridSpec::one_degree();
  const auto stats = test::plausible_stats();
  SyntheticOptions opt;
  opt.texture = 0.0;
  const auto ic = make_synthetic_state(g, test::t0(), opt);

  SUBCASE("stationary") {
    SurrogateBackend backend({0, 0.0}, stats);
    const auto run = rollout(backend, ic, 14);
    const auto t = track_storm(run, TrackConfig{});
    REQUIRE(t.size() == 15);
    for (const auto& p : t.points()) CHECK(p.position() == LatLon{33.0, 285.0});
    CHECK(mean_trajectory_error(t, t) == 0.0);
  }
  SUBCASE("one cell east per step") {
    SurrogateBackend backend({1, 0.0}, stats);
    const auto run = rollout(backend, ic, 4);
    const auto t = track_storm(run, TrackConfig{});
    REQUIRE(t.size() == 5);
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(t[k].lat == 33.0);
      CHECK(t[k].lon == 285.0 + static_cast<double>(k));
      CHECK(t[k].time == test::t0() + static_cast<int>(k) * kModelTimestep);
    }
  }
}

TEST_CASE("great-circle distance") {
  CHECK(great_circle_km({0, 0}, {1, 0}) == doctest::Approx(111.1949).epsilon(1e-6));
  CHECK(great_circle_km({33, 285}, {34, 285}) == doctest::Approx(111.1949).epsilon(1e-6));
  CHECK(great_circle_km({0, 0}, {0, 180}) == doctest::Approx(M_PI * kEarthRadiusKm));
  CHECK(great_circle_km({0, 359.5}, {0, 0.5}) == doctest::Approx(great_circle_km({0, 0}, {0, 1})));
  CounterRng rng(1);
  for (int k = 0; k < 200; ++k) {
    const LatLon a{rng.uniform01() * 180 - 90, rng.uniform01() * 360};
    const LatLon b{rng.uniform01() * 180 - 90, rng.uniform01() * 360};
    CHECK(great_circle_km(a, b) == great_circle_km(b, a));
    CHECK(oracle::rel_diff(great_circle_km(a, b), oracle::chord_distance_km(a, b)) < 1e-9);
  }
}

TEST_CASE("mean trajectory error") {
  const auto truth = straight_track({30, 280}, 0.5, 1.0, 15);
  CHECK(mean_trajectory_error(truth, truth) == 0.0);

  const auto shifted = straight_track({31, 280}, 0.5, 1.0, 15);
  const double one = mean_trajectory_error(shifted, truth);
  CHECK(one == doctest::Approx(111.1949).epsilon(1e-6));
  CHECK(oracle::rel_diff(one, oracle::mte(shifted, truth)) < 1e-9);

  const auto doubled = straight_track({32, 280}, 0.5, 1.0, 15);
  CHECK(mean_trajectory_error(doubled, truth) / one == doctest::Approx(2.0).epsilon(0.005));

  // Every point counts, including the initial one.
  auto pts = std::vector<TrackPoint>(truth.points().begin(), truth.points().end());
  pts[0].lat += 1.0;
  const double only_first = mean_trajectory_error(Trajectory(pts), truth);
  CHECK(only_first == doctest::Approx(111.1949 / 15.0).epsilon(1e-6));

  SUBCASE("unaligned") {
    const auto shorter = straight_track({30, 280}, 0.5, 1.0, 14);
    CHECK_THROWS_AS(mean_trajectory_error(shorter, truth), Error);
    Trajectory later;
    for (const auto& p : truth.points()) later.push_back({p.time + kModelTimestep, p.lat, p.lon});
    try {
      mean_trajectory_error(later, truth);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnalignedTrajectories);
    }
    CHECK_THROWS_AS(mean_trajectory_error(Trajectory{}, Trajectory{}), Error);
  }
}

TEST_CASE("trajectory csv round-trip") {
  const auto t = straight_track({30.25, 280.5}, 0.25, 1.0 / 3.0, 15);
  const auto text = trajectory_to_csv(t);
  CHECK(text.starts_with("time,lat,lon\n"));
  CHECK(trajectory_from_csv(text) == t);
}
