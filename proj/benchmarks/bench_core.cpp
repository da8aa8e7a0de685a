#include <benchmark/benchmark.h>

#include "wxr/error_stats.hpp"
#include "wxr/forecast.hpp"
#include "wxr/perturbation.hpp"
#include "wxr/synthetic.hpp"
#include "wxr/tracking.hpp"

namespace {

const wxr::TimePoint kT0 = wxr::parse_utc("2018-09-13T00:00:00Z");

const wxr::FieldSet& state(double res) {
  static const wxr::FieldSet one = wxr::make_synthetic_state(wxr::GridSpec::one_degree(), kT0);
  static const wxr::FieldSet quarter = wxr::make_synthetic_state(wxr::GridSpec::quarter_degree(), kT0);
  return res == 1.0 ? one : quarter;
}

void BM_InjectNoise(benchmark::State& st) {
  const auto& fs = state(st.range(0) == 1 ? 1.0 : 0.25);
  const auto stats = wxr::compute_stats(fs);
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(wxr::inject_noise(fs, stats, {0.0, +1, 0.2, seed++}));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(fs.values().size()));
}
BENCHMARK(BM_InjectNoise)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SurrogateStep(benchmark::State& st) {
  const auto& fs = state(1.0);
  const auto stats = wxr::compute_stats(fs);
  for (auto _ : st) benchmark::DoNotOptimize(wxr::surrogate_step(fs, {1, 0.05}, stats));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(fs.values().size()));
}
BENCHMARK(BM_SurrogateStep)->Unit(benchmark::kMillisecond);

void BM_LocateCenter(benchmark::State& st) {
  const auto& fs = state(0.25);
  wxr::TrackConfig cfg;
  if (st.range(0) == 1) cfg.region = wxr::Region::globe();
  for (auto _ : st) benchmark::DoNotOptimize(wxr::locate_center(fs, cfg));
}
BENCHMARK(BM_LocateCenter)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Summarize(benchmark::State& st) {
  const auto& fs = state(0.25);
  const auto noisy = wxr::inject_noise(fs, wxr::compute_stats(fs), {0.0, +1, 0.2, 1});
  const auto err = wxr::error_field(noisy, fs, "msl");
  for (auto _ : st) benchmark::DoNotOptimize(wxr::summarize(err, 7.5));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(err.values.size()));
}
BENCHMARK(BM_Summarize)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
