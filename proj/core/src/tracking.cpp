#include "wxr/tracking.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "wxr/error.hpp"

namespace wxr {

void TrackConfig::validate() const {
  if (continuity_radius_km && !(*continuity_radius_km > 0.0)) {
    throw Error(Errc::InvalidArgument, "continuity radius must be positive");
  }
}

double great_circle_km(const LatLon& a, const LatLon& b) noexcept {
  constexpr double rad = std::numbers::pi / 180.0;
  const double phi1 = a.lat * rad;
  const double phi2 = b.lat * rad;
  const double dphi = (b.lat - a.lat) * rad;
  const double dlambda = (b.lon - a.lon) * rad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::min(1.0, h)));
}

LatLon locate_center(const FieldSet& fs, const TrackConfig& cfg, std::optional<LatLon> prior) {
  cfg.validate();
  const GridSpec& grid = fs.grid();
  std::vector<GridIndex> candidates;
  try {
    candidates = region_indices(grid, cfg.region);
  } catch (const Error& e) {
    if (e.code() == Errc::EmptyRegion) throw Error(Errc::NoCandidatePoints, "no candidate points: empty search region");
    throw;
  }
  const bool use_radius = prior.has_value() && cfg.continuity_radius_km.has_value();
  const auto msl = fs.channel(msl_channel());

  bool found = false;
  float best = std::numeric_limits<float>::infinity();
  GridIndex best_idx{};
  for (const auto& idx : candidates) {
    if (use_radius &&
        great_circle_km(*prior, {grid.lat_of(idx.lat), grid.lon_of(idx.lon)}) > *cfg.continuity_radius_km) {
      continue;
    }
    const float v = msl[static_cast<std::size_t>(idx.lat) * grid.lon_count() + idx.lon];
    if (!found || v < best) {
      best = v;
      best_idx = idx;
      found = true;
    }
  }
  if (!found) throw Error(Errc::NoCandidatePoints, "no candidate points within the continuity radius");
  return {grid.lat_of(best_idx.lat), grid.lon_of(best_idx.lon)};
}

Trajectory track_storm(std::span<const FieldSet> states, const TrackConfig& cfg) {
  if (states.empty()) throw Error(Errc::InvalidArgument, "cannot track an empty run");
  Trajectory out;
  std::optional<LatLon> prior;
  for (std::size_t k = 0; k < states.size(); ++k) {
    try {
      const LatLon c = locate_center(states[k], cfg, prior);
      out.push_back({states[k].valid_time(), c.lat, c.lon});
      prior = c;
    } catch (const Error& e) {
      throw Error(e.code(), "timestep " + std::to_string(k) + ": " + e.what());
    }
  }
  return out;
}

Trajectory track_storm(const ForecastRun& run, const TrackConfig& cfg) { return track_storm(run.states, cfg); }

double mean_trajectory_error(const Trajectory& pred, const Trajectory& truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw Error(Errc::UnalignedTrajectories, "unaligned trajectories: lengths " + std::to_string(pred.size()) +
                                                 " and " + std::to_string(truth.size()));
  }
  double total = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (pred[k].time != truth[k].time) {
      throw Error(Errc::UnalignedTrajectories, "unaligned trajectories: timestamps differ at point " + std::to_string(k));
    }
    total += great_circle_km(pred[k].position(), truth[k].position());
  }
  return total / static_cast<double>(pred.size());
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(Errc::InvalidArgument, "malformed number in trajectory CSV: " + std::string(s));
  }
  return v;
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& t) {
  std::string out = "time,lat,lon\n";
  for (const auto& p : t.points()) out += format_utc(p.time) + "," + shortest(p.lat) + "," + shortest(p.lon) + "\n";
  return out;
}

Trajectory trajectory_from_csv(std::string_view text) {
  Trajectory t;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "time,lat,lon") continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw Error(Errc::InvalidArgument, "trajectory CSV rows must be time,lat,lon");
    t.push_back({parse_utc(line.substr(0, c1)), parse_number(line.substr(c1 + 1, c2 - c1 - 1)),
                 parse_number(line.substr(c2 + 1))});
  }
  return t;
}

}  // namespace wxr
