#include "wxr/error_stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "wxr/error.hpp"

namespace wxr {

ErrorField error_field(const FieldSet& forecast, const FieldSet& truth, std::string_view variable,
                       const std::optional<Region>& mask, std::size_t timestep) {
  if (!(forecast.grid() == truth.grid())) {
    throw Error(Errc::IncompatibleFieldsets, "incompatible fieldsets: forecast and truth grids differ");
  }
  const std::size_t c = catalog().index_of(variable);
  const bool to_hpa = c == msl_channel();

  ErrorField e;
  e.variable = catalog()[c].name;
  e.channel = c;
  e.timestep = timestep;
  e.units = to_hpa ? "hPa" : catalog()[c].units;
  e.mask = mask;

  const auto f = forecast.channel(c);
  const auto t = truth.channel(c);
  auto diff = [&](std::size_t k) {
    const double d = static_cast<double>(f[k]) - static_cast<double>(t[k]);
    return to_hpa ? pa_to_hpa(d) : d;
  };
  if (mask) {
    const auto idx = region_indices(forecast.grid(), *mask);
    e.values.reserve(idx.size());
    for (const auto& p : idx) e.values.push_back(diff(static_cast<std::size_t>(p.lat) * forecast.grid().lon_count() + p.lon));
  } else {
    e.values.resize(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) e.values[k] = diff(k);
  }
  return e;
}

void RunningMoments::push(double x) noexcept {
  const auto n1 = static_cast<double>(n_);
  ++n_;
  const auto n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
}

double RunningMoments::skewness() const noexcept {
  if (n_ == 0 || m2_ <= 0.0) return 0.0;
  return std::sqrt(static_cast<double>(n_)) * m3_ / std::pow(m2_, 1.5);
}

double RunningMoments::excess_kurtosis() const noexcept {
  if (n_ == 0 || m2_ <= 0.0) return 0.0;
  return static_cast<double>(n_) * m4_ / (m2_ * m2_) - 3.0;
}

std::uint64_t Histogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(Errc::EmptyField, "empty field");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidArgument, "quantile probability must be in [0, 1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Histogram make_histogram(std::span<const double> values, double range) {
  if (!(range > 0.0) || !std::isfinite(range)) throw Error(Errc::InvalidArgument, "histogram range must be positive");
  Histogram h;
  h.edges.resize(kHistogramBins + 1);
  const double width = 2.0 * range / static_cast<double>(kHistogramBins);
  for (std::size_t b = 0; b <= kHistogramBins; ++b) h.edges[b] = -range + width * static_cast<double>(b);
  h.edges.back() = range;
  h.counts.assign(kHistogramBins, 0);
  for (double v : values) {
    const double pos = std::floor((v + range) / width);
    std::size_t bin = 0;
    if (pos >= static_cast<double>(kHistogramBins)) {
      bin = kHistogramBins - 1;
    } else if (pos > 0.0) {
      bin = static_cast<std::size_t>(pos);
    }
    ++h.counts[bin];
  }
  return h;
}

DistributionSummary summarize(std::span<const double> values, double hist_range) {
  if (values.empty()) throw Error(Errc::EmptyField, "empty field");
  RunningMoments moments;
  std::size_t inside = 0;
  for (double v : values) {
    moments.push(v);
    if (std::abs(v) <= hist_range) ++inside;
  }

  DistributionSummary s;
  s.count = values.size();
  s.mean = moments.mean();
  s.std = std::sqrt(moments.variance());
  s.degenerate = !(moments.variance() > 0.0);
  s.skewness = s.degenerate ? 0.0 : moments.skewness();
  s.excess_kurtosis = s.degenerate ? 0.0 : moments.excess_kurtosis();

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.quantiles = {sorted.front(),
                 quantile_sorted(sorted, 0.05),
                 quantile_sorted(sorted, 0.25),
                 quantile_sorted(sorted, 0.50),
                 quantile_sorted(sorted, 0.75),
                 quantile_sorted(sorted, 0.95),
                 sorted.back()};
  s.histogram = make_histogram(values, hist_range);
  s.coverage = static_cast<double>(inside) / static_cast<double>(values.size());
  return s;
}

DistributionSummary summarize(const ErrorField& e, double hist_range) { return summarize(e.values, hist_range); }

std::vector<DistributionSummary> series_over_time(std::span<const FieldSet> forecast, std::span<const FieldSet> truth,
                                                  std::string_view variable, const std::optional<Region>& mask,
                                                  double hist_range) {
  if (forecast.size() != truth.size()) {
    throw Error(Errc::InvalidArgument, "forecast and truth series lengths differ (" + std::to_string(forecast.size()) +
                                           " vs " + std::to_string(truth.size()) + ")");
  }
  std::vector<DistributionSummary> out;
  out.reserve(forecast.size());
  for (std::size_t k = 0; k < forecast.size(); ++k) {
    if (forecast[k].valid_time() != truth[k].valid_time()) {
      throw Error(Errc::InvalidArgument, "forecast and truth valid times differ at step " + std::to_string(k));
    }
    out.push_back(summarize(error_field(forecast[k], truth[k], variable, mask, k), hist_range));
  }
  return out;
}

std::vector<DistributionSummary> series_over_time(const ForecastRun& run, std::span<const FieldSet> truth,
                                                  std::string_view variable, const std::optional<Region>& mask,
                                                  double hist_range) {
  return series_over_time(run.states, truth, variable, mask, hist_range);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view summary_csv_columns() {
  return "count,mean,std,skewness,excess_kurtosis,min,p05,p25,median,p75,p95,max,coverage,degenerate";
}

std::string summary_csv_row(const DistributionSummary& s) {
  std::string row = std::to_string(s.count);
  for (double v : {s.mean, s.std, s.skewness, s.excess_kurtosis}) row += "," + format_double(v);
  for (double v : s.quantiles.as_array()) row += "," + format_double(v);
  row += "," + format_double(s.coverage);
  row += s.degenerate ? ",1" : ",0";
  return row;
}

std::string histogram_to_csv(const Histogram& h) {
  std::string out = "lower_edge,upper_edge,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out += format_double(h.edges[b]) + "," + format_double(h.edges[b + 1]) + "," + std::to_string(h.counts[b]) + "\n";
  }
  return out;
}

}  // namespace wxr
