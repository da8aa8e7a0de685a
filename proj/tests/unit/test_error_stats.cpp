#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "test_support.hpp"
#include "wxr/error.hpp"
#include "wxr/error_stats.hpp"
#include "wxr/forecast.hpp"
#include "wxr/perturbation.hpp"

using namespace wxr;

namespace {

std::vector<double> skewed_sample(std::uint64_t seed, std::size_t n) {
  CounterRng rng(seed);
  NormalSampler normal;
  std::vector<double> x(n);
  for (auto& v : x) v = std::exp(0.7 * normal(rng)) * 3.0 - 2.0;
  return x;
}

}  // namespace

TEST_CASE("moments of {-1, 0, 1}") {
  const std::vector<double> x{-1.0, 0.0, 1.0};
  const auto s = summarize(x, 7.5);
  CHECK(s.count == 3);
  CHECK(s.mean == 0.0);
  CHECK(std::abs(s.std - std::sqrt(2.0 / 3.0)) < 1e-12);
  CHECK(std::abs(s.skewness) < 1e-12);
  CHECK(std::abs(s.excess_kurtosis + 1.5) < 1e-12);
  CHECK_FALSE(s.degenerate);
  CHECK(s.quantiles.median == 0.0);
  CHECK(s.quantiles.p25 == -0.5);
  CHECK(s.quantiles.min == -1.0);
  CHECK(s.quantiles.max == 1.0);
}

TEST_CASE("summaries agree with two-pass and sort oracles") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = skewed_sample(seed, 10'000);
    const auto s = summarize(x, 15.0);
    const auto m = oracle::moments(x);
    CHECK(oracle::rel_diff(s.mean, m.mean) < 1e-10);
    CHECK(oracle::rel_diff(s.std, m.std) < 1e-10);
    CHECK(oracle::rel_diff(s.skewness, m.skewness) < 1e-10);
    CHECK(oracle::rel_diff(s.excess_kurtosis, m.excess_kurtosis) < 1e-10);
    CHECK(s.skewness > 1.0);
    const std::array<double, 7> ps{0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0};
    const auto q = s.quantiles.as_array();
    for (std::size_t k = 0; k < ps.size(); ++k) CHECK(oracle::rel_diff(q[k], oracle::quantile(x, ps[k])) < 1e-10);
    for (std::size_t k = 1; k < q.size(); ++k) CHECK(q[k - 1] <= q[k]);
  }
}

TEST_CASE("standard normal sample") {
  CounterRng rng(2);
  NormalSampler normal;
  std::vector<double> x(1'000'000);
  for (auto& v : x) v = normal(rng);
  const auto s = summarize(x, 7.5);
  CHECK(std::abs(s.mean) < 0.005);
  CHECK(std::abs(s.std - 1.0) < 0.005);
  CHECK(std::abs(s.skewness) < 0.02);
  CHECK(std::abs(s.excess_kurtosis) < 0.05);
  CHECK(std::abs(s.quantiles.median) < 0.01);
  CHECK(std::abs(s.quantiles.p95 - 1.6449) < 0.01);
  CHECK(std::abs(s.quantiles.p05 + 1.6449) < 0.01);
  CHECK(s.coverage == 1.0);
}

TEST_CASE("degenerate sample") {
  const std::vector<double> x(50, 2.5);
  const auto s = summarize(x, 7.5);
  CHECK(s.degenerate);
  CHECK(s.std == 0.0);
  CHECK(s.skewness == 0.0);
  CHECK(s.excess_kurtosis == 0.0);
  CHECK(s.quantiles.p95 == 2.5);
  CHECK_THROWS_AS(summarize(std::vector<double>{}, 7.5), Error);
  CHECK_THROWS_AS(summarize(x, 0.0), Error);
}

TEST_CASE("histogram conserves mass and clamps outliers into edge bins") {
  const auto x = skewed_sample(9, 20'000);
  for (double range : {7.5, 15.0}) {
    const auto h = make_histogram(x, range);
    REQUIRE(h.counts.size() == kHistogramBins);
    REQUIRE(h.edges.size() == kHistogramBins + 1);
    CHECK(h.total() == x.size());
    CHECK(h.edges.front() == -range);
    CHECK(h.edges.back() == range);
    const auto above = static_cast<std::uint64_t>(std::count_if(x.begin(), x.end(), [&](double v) { return v > range; }));
    CHECK(h.counts.back() >= above);
  }
  const std::vector<double> extremes{-1e9, -7.5, 0.0, 7.5, 1e9};
  const auto h = make_histogram(extremes, 7.5);
  CHECK(h.counts.front() == 2);
  CHECK(h.counts.back() == 2);
  CHECK(h.counts[50] == 1);
  const auto s = summarize(extremes, 7.5);
  CHECK(s.coverage == doctest::Approx(0.6));
  CHECK(summarize(extremes, 1e10).coverage == 1.0);
}

TEST_CASE("wider range yields fewer edge counts") {
  const auto x = skewed_sample(4, 20'000);
  const auto narrow = make_histogram(x, 7.5);
  const auto wide = make_histogram(x, 15.0);
  CHECK(wide.counts.back() <= narrow.counts.back());
  CHECK(summarize(x, 15.0).coverage >= summarize(x, 7.5).coverage);
}

TEST_CASE("histogram csv") {
  const auto h = make_histogram(std::vector<double>{0.0}, 7.5);
  const auto text = histogram_to_csv(h);
  CHECK(text.starts_with("lower_edge,upper_edge,count\n-7.5,"));
  CHECK(std::count(text.begin(), text.end(), '\n') == 102);
}

TEST_CASE("error fields") {
  const auto g = GridSpec::one_degree();
  const auto msl = msl_channel();
  const auto truth = FieldSet::filled(g, test::t0(), 101000.0f);
  const auto forecast = test::modify(truth, [&](std::size_t c, auto, auto, float v) { return c == msl ? v + 250.0f : v - 1.0f; });

  const auto e = error_field(forecast, truth, "msl", Region::atlantic());
  CHECK(e.units == "hPa");
  CHECK(e.values.size() == 231);
  for (double v : e.values) CHECK(v == 2.5);

  const auto t = error_field(forecast, truth, "t2m");
  CHECK(t.units == "K");
  CHECK(t.values.size() == g.point_count());
  for (double v : t.values) CHECK(v == -1.0);

  CHECK_THROWS_AS(error_field(forecast, truth, "cape"), Error);
  CHECK_THROWS_AS(error_field(forecast, FieldSet::filled(GridSpec::global(2.0), test::t0(), 0.0f), "msl"), Error);
}

TEST_CASE("error statistics over a rollout") {
  const auto g = GridSpec::global(5.0);
  const auto stats = test::plausible_stats();
  const auto ic = test::make_fieldset(g, test::t0(), [&](std::size_t c, auto, auto) { return static_cast<float>(stats[c].mean); });
  SurrogateBackend backend({1, 0.25}, stats);
  const auto truth = rollout(backend, ic, 14);

  SUBCASE("zero noise gives zero error everywhere") {
    const auto run = rollout(backend, inject_noise(ic, stats, {0.0, +1, 0.0, 1}), 14);
    const auto series = series_over_time(run, truth.states, "msl", std::nullopt, 7.5);
    REQUIRE(series.size() == 15);
    for (const auto& s : series) {
      CHECK(s.mean == 0.0);
      CHECK(s.std == 0.0);
      CHECK(s.degenerate);
    }
  }
  SUBCASE("noise contracts") {
    const auto run = rollout(backend, inject_noise(ic, stats, {0.0, +1, 0.5, 1}), 14);
    const auto series = series_over_time(run, truth.states, "msl", std::nullopt, 15.0);
    REQUIRE(series.size() == 15);
    CHECK(series[0].std == doctest::Approx(6.0).epsilon(0.1));  // 0.5 * 1200 Pa = 6 hPa
    for (std::size_t k = 1; k < series.size(); ++k) {
      CHECK(series[k].std / series[k - 1].std == doctest::Approx(0.75).epsilon(1e-3));
    }
  }
  SUBCASE("length mismatch") {
    const std::span<const FieldSet> shorter(truth.states.data(), 10);
    CHECK_THROWS_AS(series_over_time(truth, shorter, "msl", std::nullopt, 7.5), Error);
  }
}

TEST_CASE("summary csv row") {
  const auto s = summarize(std::vector<double>{-1.0, 0.0, 1.0}, 7.5);
  const auto row = summary_csv_row(s);
  const auto cols = std::string(summary_csv_columns());
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(cols.begin(), cols.end(), ','));
  CHECK(row.starts_with("3,0,"));
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5) == "-2.5");
}
