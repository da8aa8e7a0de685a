#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "test_support.hpp"
#include "wxr/error.hpp"
#include "wxr/perturbation.hpp"

using namespace wxr;

namespace {

const GridSpec kSmall(2'000'000, 91, 180);

double pearson(std::span<const double> a, std::span<const double> b) {
  long double ma = 0, mb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= a.size();
  mb /= b.size();
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

}  // namespace

TEST_CASE("compute_stats on {1,2,3,4}") {
  const GridSpec g(180'000'000, 2, 2);  // lats 90, -90; lons 0, 180
  const auto fs = test::make_fieldset(g, test::t0(), [](std::size_t c, std::size_t i, std::size_t j) {
    return static_cast<float>(1 + 2 * i + j) + static_cast<float>(c);
  });
  const auto s = compute_stats(fs);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    CHECK(s[c].mean == doctest::Approx(2.5 + c).epsilon(1e-12));
    CHECK(s[c].std == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
  }
}

TEST_CASE("constant channel is degenerate") {
  const auto base = test::random_fieldset(GridSpec::global(10.0), 3);
  const auto t2m = catalog().index_of("t2m");
  const auto fs = test::modify(base, [&](std::size_t c, auto, auto, float v) { return c == t2m ? 288.0f : v; });
  const auto measured = measure_stats(fs);
  CHECK(measured.degenerate_channels() == std::vector<std::string>{"t2m"});
  try {
    compute_stats(fs);
    FAIL("expected degenerate std");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateStd);
    CHECK(std::string(e.what()).find("t2m") != std::string::npos);
  }
}

TEST_CASE("compute_stats matches a two-pass oracle") {
  const auto fs = test::random_fieldset(GridSpec::global(5.0), 11);
  const auto s = compute_stats(fs);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const auto ch = fs.channel(c);
    const auto m = oracle::moments(std::vector<double>(ch.begin(), ch.end()));
    CHECK(oracle::rel_diff(s[c].mean, m.mean) < 1e-10);
    CHECK(oracle::rel_diff(s[c].std, m.std) < 1e-10);
  }
}

TEST_CASE("zero noise returns a bitwise copy") {
  const auto fs = test::random_fieldset(kSmall, 5);
  const auto out = inject_noise(fs, test::plausible_stats(), {0.0, +1, 0.0, 1234});
  CHECK(out.bitwise_equal(fs));
}

TEST_CASE("noise is deterministic in the seed") {
  const auto fs = test::random_fieldset(kSmall, 5);
  const auto stats = test::plausible_stats();
  const NoiseSpec spec{0.0, +1, 0.1, 99};
  const auto a = inject_noise(fs, stats, spec);
  const auto b = inject_noise(fs, stats, spec);
  CHECK(a.bitwise_equal(b));

  NoiseSpec other = spec;
  other.seed = 100;
  const auto c = inject_noise(fs, stats, other);
  std::size_t differ = 0;
  for (std::size_t k = 0; k < a.values().size(); ++k) differ += a.values()[k] != c.values()[k];
  CHECK(static_cast<double>(differ) >= 0.99 * static_cast<double>(a.values().size()));
}

TEST_CASE("noise moments follow alpha, sign and beta") {
  const auto fs = FieldSet::filled(kSmall, test::t0(), 0.0f);
  const auto stats = test::plausible_stats();
  const std::size_t n = kSmall.point_count();
  for (int sign : {+1, -1}) {
    const NoiseSpec spec{0.02, sign, 0.2, 7};
    for (std::size_t c : {std::size_t{0}, msl_channel(), catalog().index_of("t850")}) {
      const auto xi = channel_noise(c, n, stats[c], spec);
      const auto m = oracle::moments(xi);
      const double sigma = 0.2 * stats[c].std;
      const double tol = 4.0 * sigma / std::sqrt(static_cast<double>(n));
      CHECK(std::abs(m.mean - sign * 0.02 * stats[c].mean) < tol);
      CHECK(std::abs(m.std / sigma - 1.0) < 0.03);
    }
  }
}

TEST_CASE("channels draw independent noise") {
  const auto stats = test::plausible_stats();
  const NoiseSpec spec{0.0, +1, 0.3, 2024};
  const std::size_t n = 200'000;
  const auto a = channel_noise(0, n, stats[0], spec);
  const auto b = channel_noise(1, n, stats[1], spec);
  const auto c = channel_noise(msl_channel(), n, stats[msl_channel()], spec);
  CHECK(std::abs(pearson(a, b)) < 0.01);
  CHECK(std::abs(pearson(a, c)) < 0.01);
  CHECK(std::abs(pearson(b, c)) < 0.01);
}

TEST_CASE("invalid noise specs") {
  const auto fs = test::random_fieldset(GridSpec::global(10.0), 1);
  const auto stats = test::plausible_stats();
  CHECK_THROWS_AS(inject_noise(fs, stats, {0.0, +1, 1.5, 0}), Error);
  CHECK_THROWS_AS(inject_noise(fs, stats, {-0.1, +1, 0.1, 0}), Error);
  CHECK_THROWS_AS(inject_noise(fs, stats, {0.1, 0, 0.1, 0}), Error);
  CHECK_THROWS_AS(inject_noise(fs, stats, {std::nan(""), +1, 0.1, 0}), Error);
  CHECK_THROWS_AS(inject_noise(fs, VariableStats(std::vector<ChannelStats>(72)), {0.0, +1, 0.1, 0}), Error);
}

TEST_CASE("distribution names") {
  for (auto d : {Distribution::Chi2, Distribution::Lognormal, Distribution::Normal, Distribution::Uniform}) {
    CHECK(parse_distribution(to_string(d)) == d);
  }
  try {
    parse_distribution("cauchy");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("unsupported distribution") != std::string::npos);
  }
  CHECK_THROWS_AS(BaseDistribution({Distribution::Chi2, 0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(BaseDistribution({Distribution::Lognormal, 4, 0.0}).validate(), Error);
}

TEST_CASE("analytic moments agree with Monte Carlo") {
  const std::size_t n = 10'000'000;
  for (auto kind : {Distribution::Chi2, Distribution::Lognormal, Distribution::Normal, Distribution::Uniform}) {
    const BaseDistribution dist{kind, 4, 1.0};
    const Moments m = analytic_moments(dist);
    CounterRng rng(17);
    NormalSampler normal;
    long double s = 0, s2 = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = sample_base(dist, rng, normal);
      s += x;
      s2 += static_cast<long double>(x) * x;
    }
    const double mean = static_cast<double>(s / n);
    const double sd = static_cast<double>(std::sqrt(s2 / n - (s / n) * (s / n)));
    INFO(to_string(kind));
    // Mean compared on the std scale so the zero-mean normal is meaningful.
    CHECK(std::abs(mean - m.mean) < 0.005 * m.std);
    CHECK(std::abs(sd / m.std - 1.0) < 0.005);
  }
  CHECK(analytic_moments({Distribution::Chi2, 4, 1.0}).mean == 4.0);
  CHECK(analytic_moments({Distribution::Chi2, 4, 1.0}).std == doctest::Approx(std::sqrt(8.0)));
  CHECK(analytic_moments({Distribution::Lognormal, 4, 1.0}).mean == doctest::Approx(std::exp(0.5)));
  CHECK(analytic_moments({Distribution::Uniform, 4, 1.0}).std == doctest::Approx(std::sqrt(1.0 / 12.0)));
}

TEST_CASE("standardized uniform samples are bounded by sqrt(3)") {
  CounterRng rng(3);
  const auto z = standardized_samples({Distribution::Uniform, 4, 1.0}, rng, 100'000);
  const double bound = std::sqrt(3.0);
  for (double v : z) {
    CHECK(v >= -bound);
    CHECK(v < bound);
  }
  const auto m = oracle::moments(z);
  CHECK(std::abs(m.mean) < 0.02);
  CHECK(std::abs(m.std - 1.0) < 0.02);
}

TEST_CASE("random initial conditions hit the target moments") {
  const auto stats = test::plausible_stats();
  const auto grid = GridSpec::one_degree();
  const double n = static_cast<double>(grid.point_count());
  for (auto kind : {Distribution::Chi2, Distribution::Lognormal, Distribution::Normal, Distribution::Uniform}) {
    const auto fs = random_ic(grid, test::t0(), {{kind, 4, 1.0}, 5, stats});
    CHECK(fs.valid_time() == test::t0());
    // Sample std has standard error sigma * sqrt((kurtosis + 2) / n) / 2; lognormal(0, 1) has
    // excess kurtosis ~110.9, which puts one standard error near 2% at this grid size.
    const double kurt = kind == Distribution::Lognormal ? 110.94 : (kind == Distribution::Chi2 ? 3.0 : 0.0);
    const double std_tol = std::max(0.02, 4.0 * 0.5 * std::sqrt((kurt + 2.0) / n));
    for (std::size_t c : {std::size_t{0}, msl_channel(), catalog().index_of("z500")}) {
      const auto ch = fs.channel(c);
      const auto m = oracle::moments(std::vector<double>(ch.begin(), ch.end()));
      INFO(to_string(kind), " ", catalog()[c].name);
      CHECK(std::abs(m.mean - stats[c].mean) < 0.02 * stats[c].std);
      CHECK(std::abs(m.std / stats[c].std - 1.0) < std_tol);
      if (kind == Distribution::Chi2 || kind == Distribution::Lognormal) CHECK(m.skewness > 0.5);
    }
  }
}

TEST_CASE("chi2 random ICs can drive humidity negative") {
  const auto stats = test::plausible_stats();
  const auto rh = catalog().index_of("rh200");
  REQUIRE(stats[rh].mean / stats[rh].std < std::sqrt(2.0));
  const auto fs = random_ic(GridSpec::one_degree(), test::t0(), {{Distribution::Chi2, 4, 1.0}, 1, stats});
  const auto ch = fs.channel(rh);
  CHECK(*std::min_element(ch.begin(), ch.end()) < 0.0f);
  // Chi2 with 4 dof standardizes to >= -sqrt(2), so lower-level RH (mean/std ~ 2) stays positive.
  const auto low = fs.channel(catalog().index_of("rh850"));
  CHECK(*std::min_element(low.begin(), low.end()) > 0.0f);
}

TEST_CASE("random ICs are reproducible and validate their spec") {
  const auto stats = test::plausible_stats();
  const auto g = GridSpec::global(5.0);
  const RandomICSpec spec{{Distribution::Normal, 4, 1.0}, 8, stats};
  CHECK(random_ic(g, test::t0(), spec).bitwise_equal(random_ic(g, test::t0(), spec)));
  RandomICSpec bad = spec;
  bad.distribution.chi2_dof = -1;
  bad.distribution.kind = Distribution::Chi2;
  CHECK_THROWS_AS(random_ic(g, test::t0(), bad), Error);
  bad = spec;
  bad.target[3].std = 0.0;
  CHECK_THROWS_AS(random_ic(g, test::t0(), bad), Error);
}
