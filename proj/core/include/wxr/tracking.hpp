#pragma once

#include <optional>
#include <span>

#include "wxr/field_set.hpp"
#include "wxr/forecast.hpp"
#include "wxr/grid.hpp"

namespace wxr {

inline constexpr double kEarthRadiusKm = 6371.0;

struct TrackConfig {
  Region region = Region::atlantic();
  /// When set, each search after the first is limited to this great-circle
  /// distance from the previous center.
  std::optional<double> continuity_radius_km;

  void validate() const;
};

/// Grid point of minimum MSL inside cfg.region (and within the continuity
/// radius of `prior` when both are set). Ties resolve to the first point in
/// row-major order. Throws wxr::Error(NoCandidatePoints) if nothing qualifies.
LatLon locate_center(const FieldSet& fs, const TrackConfig& cfg,
                     std::optional<LatLon> prior = std::nullopt);

/// locate_center() on each state in turn, feeding each center forward as the prior.
Trajectory track_storm(std::span<const FieldSet> states, const TrackConfig& cfg);
Trajectory track_storm(const ForecastRun& run, const TrackConfig& cfg);

/// Haversine distance on a sphere of radius 6371 km.
double great_circle_km(const LatLon& a, const LatLon& b) noexcept;

/// Sum of per-point great-circle distances divided by the number of points.
/// Throws wxr::Error(UnalignedTrajectories) on length or timestamp mismatch.
double mean_trajectory_error(const Trajectory& pred, const Trajectory& truth);

std::string trajectory_to_csv(const Trajectory& t);
Trajectory trajectory_from_csv(std::string_view text);

}  // namespace wxr
