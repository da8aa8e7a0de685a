#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wxr {

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const LatLon&) const = default;
};

/// Regular lat/lon grid. Latitude descends from +90, longitude ascends from 0
/// in [0, 360). Spacing is stored in integer microdegrees so that grid
/// coordinates compare exactly against region bounds.
class GridSpec {
 public:
  GridSpec(std::uint32_t resolution_microdeg, std::uint32_t lat_count, std::uint32_t lon_count);

  /// Full-globe grid: 180/res + 1 latitudes, 360/res longitudes.
  static GridSpec global(double resolution_deg);
  static GridSpec quarter_degree() { return global(0.25); }
  static GridSpec one_degree() { return global(1.0); }

  std::uint32_t resolution_microdeg() const noexcept { return resolution_microdeg_; }
  double resolution_deg() const noexcept { return resolution_microdeg_ * 1e-6; }
  std::uint32_t lat_count() const noexcept { return lat_count_; }
  std::uint32_t lon_count() const noexcept { return lon_count_; }
  std::size_t point_count() const noexcept {
    return static_cast<std::size_t>(lat_count_) * lon_count_;
  }

  std::int64_t lat_microdeg(std::size_t i) const noexcept {
    return 90'000'000LL - static_cast<std::int64_t>(i) * resolution_microdeg_;
  }
  std::int64_t lon_microdeg(std::size_t j) const noexcept {
    return static_cast<std::int64_t>(j) * resolution_microdeg_;
  }
  double lat_of(std::size_t i) const noexcept { return lat_microdeg(i) * 1e-6; }
  double lon_of(std::size_t j) const noexcept { return lon_microdeg(j) * 1e-6; }

  bool operator==(const GridSpec&) const = default;

 private:
  std::uint32_t resolution_microdeg_;
  std::uint32_t lat_count_;
  std::uint32_t lon_count_;
};

/// Closed lat/lon box. Longitudes are stored in [0, 360]; west longitudes
/// given to make() are normalized by +360. A box with lon_min > lon_max
/// wraps through the prime meridian.
struct Region {
  double lat_min = -90.0;
  double lat_max = 90.0;
  double lon_min = 0.0;
  double lon_max = 360.0;

  static Region make(double lat_min, double lat_max, double lon_min, double lon_max);
  /// 30N-40N, 70W-90W.
  static Region atlantic() { return make(30.0, 40.0, -90.0, -70.0); }
  static Region globe() { return make(-90.0, 90.0, 0.0, 360.0); }

  bool contains(const LatLon& p) const noexcept;

  bool operator==(const Region&) const = default;
};

struct GridIndex {
  std::uint32_t lat = 0;
  std::uint32_t lon = 0;

  bool operator==(const GridIndex&) const = default;
};

/// All grid points inside `region`, row-major (lat index, then lon index).
/// Throws wxr::Error(EmptyRegion) if no point falls inside.
std::vector<GridIndex> region_indices(const GridSpec& grid, const Region& region);

/// Longitude mapped into [0, 360).
double normalize_lon(double lon) noexcept;

}  // namespace wxr
