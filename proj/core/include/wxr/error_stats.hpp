#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wxr/field_set.hpp"
#include "wxr/forecast.hpp"
#include "wxr/grid.hpp"

namespace wxr {

inline constexpr std::size_t kHistogramBins = 101;

/// Signed forecast-minus-truth error for one variable at one timestep.
/// Positive values are overestimates.
struct ErrorField {
  std::string variable;
  std::size_t channel = 0;
  std::size_t timestep = 0;
  /// "hPa" for MSL, otherwise the catalog units.
  std::string units;
  std::optional<Region> mask;
  std::vector<double> values;
};

ErrorField error_field(const FieldSet& forecast, const FieldSet& truth, std::string_view variable,
                       const std::optional<Region>& mask = std::nullopt, std::size_t timestep = 0);

/// Streaming central moments (mean, M2, M3, M4) with pairwise-stable updates.
class RunningMoments {
 public:
  void push(double x) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Population variance (1/N).
  double variance() const noexcept { return n_ ? m2_ / static_cast<double>(n_) : 0.0; }
  /// m3 / m2^(3/2) with 1/N central moments; 0 when variance is 0.
  double skewness() const noexcept;
  /// m4 / m2^2 - 3; 0 when variance is 0.
  double excess_kurtosis() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

struct Quantiles {
  double min = 0.0;
  double p05 = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
  double max = 0.0;

  std::array<double, 7> as_array() const noexcept { return {min, p05, p25, median, p75, p95, max}; }
};

struct Histogram {
  /// kHistogramBins + 1 ascending boundaries.
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const noexcept;
};

struct DistributionSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  /// Zero variance: skewness and kurtosis are reported as 0.
  bool degenerate = false;
  Quantiles quantiles;
  Histogram histogram;
  /// Fraction of values with |v| <= histogram range.
  double coverage = 0.0;
};

/// Linear interpolation between order statistics of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double p);

/// 101 equal bins over [-range, +range]; out-of-range values land in the edge bins.
Histogram make_histogram(std::span<const double> values, double range);

/// Throws wxr::Error(EmptyField) for an empty sample and
/// wxr::Error(InvalidArgument) for a non-positive range.
DistributionSummary summarize(std::span<const double> values, double hist_range);
DistributionSummary summarize(const ErrorField& e, double hist_range);

/// One summary per time point; entry 0 is the initial-condition error.
std::vector<DistributionSummary> series_over_time(std::span<const FieldSet> forecast,
                                                  std::span<const FieldSet> truth,
                                                  std::string_view variable,
                                                  const std::optional<Region>& mask, double hist_range);
std::vector<DistributionSummary> series_over_time(const ForecastRun& run, std::span<const FieldSet> truth,
                                                  std::string_view variable,
                                                  const std::optional<Region>& mask, double hist_range);

/// Column names for summary_csv_row(), without any caller-supplied leading columns.
std::string_view summary_csv_columns();
std::string summary_csv_row(const DistributionSummary& s);

/// `lower_edge,upper_edge,count` per bin.
std::string histogram_to_csv(const Histogram& h);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace wxr
