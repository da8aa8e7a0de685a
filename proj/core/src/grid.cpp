#include "wxr/grid.hpp"

#include <cmath>
#include <string>

#include "wxr/error.hpp"

namespace wxr {

namespace {

std::int64_t to_microdeg(double deg) { return std::llround(deg * 1e6); }

}  // namespace

GridSpec::GridSpec(std::uint32_t resolution_microdeg, std::uint32_t lat_count, std::uint32_t lon_count)
    : resolution_microdeg_(resolution_microdeg), lat_count_(lat_count), lon_count_(lon_count) {
  if (resolution_microdeg_ == 0) throw Error(Errc::InvalidArgument, "grid resolution must be positive");
  if (lat_count_ == 0 || lon_count_ == 0) throw Error(Errc::InvalidArgument, "grid must have at least one point");
  const std::uint64_t max_lat = 180'000'000ULL / resolution_microdeg_ + 1;
  const std::uint64_t max_lon = 360'000'000ULL / resolution_microdeg_;
  if (lat_count_ > max_lat || lon_count_ > max_lon) {
    throw Error(Errc::InvalidArgument, "grid dimensions exceed the globe at this resolution");
  }
}

GridSpec GridSpec::global(double resolution_deg) {
  if (!(resolution_deg > 0.0) || !std::isfinite(resolution_deg)) {
    throw Error(Errc::InvalidArgument, "grid resolution must be positive");
  }
  const std::int64_t res = to_microdeg(resolution_deg);
  if (res <= 0 || 180'000'000LL % res != 0) {
    throw Error(Errc::InvalidArgument, "resolution must divide 180 degrees evenly");
  }
  return GridSpec(static_cast<std::uint32_t>(res), static_cast<std::uint32_t>(180'000'000LL / res + 1),
                  static_cast<std::uint32_t>(360'000'000LL / res));
}

double normalize_lon(double lon) noexcept {
  double r = std::fmod(lon, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

Region Region::make(double lat_min, double lat_max, double lon_min, double lon_max) {
  if (!(lat_min < lat_max)) throw Error(Errc::InvalidArgument, "region requires lat_min < lat_max");
  if (!std::isfinite(lon_min) || !std::isfinite(lon_max)) {
    throw Error(Errc::InvalidArgument, "region longitudes must be finite");
  }
  Region r{lat_min, lat_max, lon_min, lon_max};
  if (lon_max - lon_min >= 360.0) {
    r.lon_min = 0.0;
    r.lon_max = 360.0;
    return r;
  }
  r.lon_min = normalize_lon(lon_min);
  // Keep an eastern bound of exactly 360 rather than folding it onto 0.
  r.lon_max = lon_max == 360.0 ? 360.0 : normalize_lon(lon_max);
  return r;
}

bool Region::contains(const LatLon& p) const noexcept {
  const auto lat = to_microdeg(p.lat);
  if (lat < to_microdeg(lat_min) || lat > to_microdeg(lat_max)) return false;
  const auto lon = to_microdeg(normalize_lon(p.lon));
  const auto lo = to_microdeg(lon_min);
  const auto hi = to_microdeg(lon_max);
  if (lo <= hi) return lon >= lo && lon <= hi;
  return lon >= lo || lon <= hi;
}

std::vector<GridIndex> region_indices(const GridSpec& grid, const Region& region) {
  const auto lat_lo = to_microdeg(region.lat_min);
  const auto lat_hi = to_microdeg(region.lat_max);
  const auto lon_lo = to_microdeg(region.lon_min);
  const auto lon_hi = to_microdeg(region.lon_max);
  const bool wraps = lon_lo > lon_hi;

  std::vector<GridIndex> out;
  for (std::uint32_t i = 0; i < grid.lat_count(); ++i) {
    const auto lat = grid.lat_microdeg(i);
    if (lat < lat_lo || lat > lat_hi) continue;
    for (std::uint32_t j = 0; j < grid.lon_count(); ++j) {
      const auto lon = grid.lon_microdeg(j);
      const bool inside = wraps ? (lon >= lon_lo || lon <= lon_hi) : (lon >= lon_lo && lon <= lon_hi);
      if (inside) out.push_back({i, j});
    }
  }
  if (out.empty()) throw Error(Errc::EmptyRegion, "empty region");
  return out;
}

}  // namespace wxr
