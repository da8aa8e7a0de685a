#include <doctest.h>

#include <algorithm>
#include <set>

#include "test_support.hpp"
#include "wxr/catalog.hpp"
#include "wxr/error.hpp"
#include "wxr/field_set.hpp"
#include "wxr/grid.hpp"

using namespace wxr;

TEST_CASE("catalog has the 73 fixed variables in order") {
  const VariableCatalog cat = build_catalog();
  CHECK(cat.size() == 73);
  CHECK(cat[cat.index_of("msl")].units == "Pa");
  CHECK(cat.channels_with_prefix("RH").size() == 13);

  const char* singles[] = {"u10m", "u100m", "v10m", "v100m", "t2m", "sp", "msl", "tcwv"};
  for (std::size_t c = 0; c < 8; ++c) {
    CHECK(cat[c].name == singles[c]);
    CHECK(cat[c].single_layer());
  }
  // z, t, u, v, rh blocks with ascending levels.
  CHECK(cat[8].name == "z50");
  CHECK(cat[20].name == "z1000");
  CHECK(cat[21].name == "t50");
  CHECK(cat[60].name == "rh50");
  CHECK(cat[72].name == "rh1000");
  for (std::size_t c = 8; c < 73; ++c) {
    CHECK(*cat[c].level_hpa == kPressureLevels[(c - 8) % 13]);
  }
}

TEST_CASE("channel index round-trips through name lookup") {
  std::set<std::string> names;
  for (std::size_t c = 0; c < catalog().size(); ++c) {
    CHECK(catalog().index_of(catalog()[c].name) == c);
    names.insert(catalog()[c].name);
  }
  CHECK(names.size() == 73);
  CHECK_THROWS_AS(catalog().index_of("cape"), Error);
}

TEST_CASE("grid geometry") {
  const auto q = GridSpec::quarter_degree();
  CHECK(q.lat_count() == 721);
  CHECK(q.lon_count() == 1440);
  const auto one = GridSpec::one_degree();
  CHECK(one.lat_count() == 181);
  CHECK(one.lon_count() == 360);
  CHECK(one.lat_of(0) == 90.0);
  CHECK(one.lat_of(180) == -90.0);
  CHECK(one.lon_of(359) == 359.0);
  CHECK(q.lat_of(1) == 89.75);
  CHECK_THROWS_AS(GridSpec::global(0.7), Error);
  CHECK_THROWS_AS(GridSpec(1'000'000, 182, 360), Error);
}

TEST_CASE("region_indices on the 1 degree grid") {
  const auto grid = GridSpec::one_degree();

  SUBCASE("atlantic box") {
    // Lattice points with lat in {30..40} and lon in {270..290}: 11 x 21.
    std::size_t brute = 0;
    for (int lat = -90; lat <= 90; ++lat) {
      for (int lon = 0; lon < 360; ++lon) brute += (lat >= 30 && lat <= 40 && lon >= 270 && lon <= 290);
    }
    CHECK(brute == 231);
    const auto idx = region_indices(grid, Region::atlantic());
    CHECK(idx.size() == 231);
    CHECK(idx.front() == GridIndex{50, 270});
    CHECK(idx.back() == GridIndex{60, 290});
    for (std::size_t k = 1; k < idx.size(); ++k) {
      const auto a = idx[k - 1], b = idx[k];
      CHECK((a.lat < b.lat || (a.lat == b.lat && a.lon < b.lon)));
    }
  }
  SUBCASE("whole globe") { CHECK(region_indices(grid, Region::globe()).size() == grid.point_count()); }
  SUBCASE("south of the pole") {
    try {
      region_indices(grid, Region::make(-100.0, -95.0, 0.0, 10.0));
      FAIL("expected empty region");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::EmptyRegion);
      CHECK(std::string(e.what()) == "empty region");
    }
  }
  SUBCASE("prime-meridian wrap") {
    const auto idx = region_indices(grid, Region::make(-1.0, 1.0, -2.0, 2.0));
    CHECK(idx.size() == 15);
    CHECK(idx.front() == GridIndex{89, 0});
    CHECK(idx[2] == GridIndex{89, 2});
    CHECK(idx[3] == GridIndex{89, 358});
  }
  SUBCASE("sub-box containment") {
    const auto outer = region_indices(grid, Region::make(20.0, 50.0, -100.0, -60.0));
    for (const auto& p : region_indices(grid, Region::atlantic())) {
      CHECK(std::find(outer.begin(), outer.end(), p) != outer.end());
    }
  }
}

TEST_CASE("west longitudes are normalized") {
  const auto r = Region::atlantic();
  CHECK(r.lon_min == 270.0);
  CHECK(r.lon_max == 290.0);
  CHECK(r.contains({30.0, -80.0}));
  CHECK(r.contains({40.0, 290.0}));
  CHECK_FALSE(r.contains({40.25, 280.0}));
  CHECK_THROWS_AS(Region::make(40.0, 30.0, 0.0, 1.0), Error);
}

TEST_CASE("FieldSet construction guards") {
  const auto grid = GridSpec::global(10.0);
  CHECK_THROWS_AS(FieldSet(grid, test::t0(), std::vector<float>(10)), Error);
  std::vector<float> v(kChannelCount * grid.point_count(), 1.0f);
  v[123] = std::numeric_limits<float>::quiet_NaN();
  try {
    FieldSet(grid, test::t0(), v);
    FAIL("expected non-finite error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFinite);
  }
}

TEST_CASE("field_difference") {
  const auto grid = GridSpec::global(10.0);
  const auto a = test::random_fieldset(grid, 1);
  const auto b = test::random_fieldset(grid, 2);

  SUBCASE("identity gives zeros") {
    for (float v : field_difference(a, a).values()) CHECK(v == 0.0f);
  }
  SUBCASE("constant MSL offset") {
    const auto msl = msl_channel();
    const auto f = test::modify(a, [&](std::size_t c, auto, auto, float v) { return c == msl ? 101325.0f : v; });
    const auto t = test::modify(a, [&](std::size_t c, auto, auto, float v) { return c == msl ? 101300.0f : v; });
    for (float v : field_difference(f, t).channel(msl)) CHECK(v == 25.0f);
  }
  SUBCASE("matches elementwise oracle and is antisymmetric") {
    const auto d = field_difference(a, b);
    const auto r = field_difference(b, a);
    for (std::size_t k = 0; k < d.values().size(); ++k) {
      CHECK(d.values()[k] == a.values()[k] - b.values()[k]);
      CHECK(d.values()[k] == -r.values()[k]);
    }
  }
  SUBCASE("grid mismatch") {
    const auto c = test::random_fieldset(GridSpec::global(5.0), 3);
    try {
      field_difference(a, c);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::IncompatibleFieldsets);
    }
  }
}

TEST_CASE("pa_to_hpa") {
  CHECK(pa_to_hpa(101325.0) == doctest::Approx(1013.25));
  CHECK(pa_to_hpa(0.0) == 0.0);
  CHECK(pa_to_hpa(-750.0) == -7.5);
}

TEST_CASE("trajectory spacing") {
  Trajectory t;
  t.push_back({test::t0(), 30.0, 280.0});
  t.push_back({test::t0() + kModelTimestep, 31.0, 281.0});
  CHECK(t.size() == 2);
  CHECK_THROWS_AS(t.push_back({test::t0() + std::chrono::hours(18), 0.0, 0.0}), Error);
  CHECK_THROWS_AS(t.push_back({test::t0(), 0.0, 0.0}), Error);
}

TEST_CASE("utc formatting round-trip") {
  const auto t = parse_utc("2018-09-16T12:00:00Z");
  CHECK(format_utc(t) == "2018-09-16T12:00:00Z");
  CHECK(t - test::t0() == std::chrono::hours(84));
  CHECK(parse_utc("2018-09-16 12:00") == t);
  CHECK_THROWS_AS(parse_utc("2018-13-01T00:00:00Z"), Error);
  CHECK_THROWS_AS(parse_utc("yesterday"), Error);
}
