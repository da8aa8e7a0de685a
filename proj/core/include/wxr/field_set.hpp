#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wxr/catalog.hpp"
#include "wxr/grid.hpp"
#include "wxr/time_util.hpp"

namespace wxr {

/// One atmospheric state snapshot: every catalog variable on one grid at one
/// valid time. Values are float32 in native units, laid out (channel, lat, lon)
/// row-major. Immutable once constructed; all values are finite.
class FieldSet {
 public:
  /// Throws wxr::Error(DimMismatch) if values.size() != 73 * points and
  /// wxr::Error(NonFinite) if any value is NaN or infinite.
  FieldSet(GridSpec grid, TimePoint valid_time, std::vector<float> values);

  /// Every channel set to the same value.
  static FieldSet filled(GridSpec grid, TimePoint valid_time, float value);

  const GridSpec& grid() const noexcept { return grid_; }
  const VariableCatalog& variables() const noexcept { return catalog(); }
  TimePoint valid_time() const noexcept { return valid_time_; }
  std::size_t channel_count() const noexcept { return kChannelCount; }

  std::span<const float> values() const noexcept { return values_; }
  std::span<const float> channel(std::size_t c) const;
  float at(std::size_t c, std::size_t lat, std::size_t lon) const {
    return values_[(c * grid_.lat_count() + lat) * grid_.lon_count() + lon];
  }

  /// Copy with a different valid time.
  FieldSet with_time(TimePoint t) const;

  /// Same grid, same time, bitwise-identical payload.
  bool bitwise_equal(const FieldSet& other) const noexcept;

 private:
  GridSpec grid_;
  TimePoint valid_time_;
  std::vector<float> values_;
};

/// Elementwise a - b on every channel; the result carries a's valid time.
/// Throws wxr::Error(IncompatibleFieldsets) on grid mismatch.
FieldSet field_difference(const FieldSet& a, const FieldSet& b);

constexpr double pa_to_hpa(double pa) noexcept { return pa / 100.0; }

struct TrackPoint {
  TimePoint time;
  double lat = 0.0;
  double lon = 0.0;

  LatLon position() const noexcept { return {lat, lon}; }
  bool operator==(const TrackPoint&) const = default;
};

/// Storm-center positions at consecutive model timesteps.
class Trajectory {
 public:
  Trajectory() = default;
  /// Throws wxr::Error(InvalidArgument) unless times step by exactly kModelTimestep.
  explicit Trajectory(std::vector<TrackPoint> points);

  void push_back(const TrackPoint& p);

  std::span<const TrackPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const TrackPoint& operator[](std::size_t k) const { return points_.at(k); }

  bool operator==(const Trajectory&) const = default;

 private:
  std::vector<TrackPoint> points_;
};

}  // namespace wxr
