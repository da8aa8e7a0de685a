#pragma once

// Brute-force reference computations. These deliberately avoid the library's
// implementation paths (no region_indices, no RunningMoments, no haversine).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <tuple>
#include <vector>

#include "wxr/ensemble.hpp"
#include "wxr/field_set.hpp"

namespace wxr::oracle {

/// Exhaustive scan of every grid point, filtering by box and (optionally) a
/// great-circle radius computed with the spherical law of cosines.
inline std::optional<LatLon> masked_argmin(const FieldSet& fs, double lat_min, double lat_max, double lon_min,
                                           double lon_max, std::optional<LatLon> prior = std::nullopt,
                                           std::optional<double> radius_km = std::nullopt) {
  const auto& g = fs.grid();
  const auto msl = fs.channel(msl_channel());
  std::optional<LatLon> best;
  float best_v = 0.0f;
  const bool wraps = lon_min > lon_max;
  for (std::size_t i = 0; i < g.lat_count(); ++i) {
    for (std::size_t j = 0; j < g.lon_count(); ++j) {
      const double lat = 90.0 - static_cast<double>(i) * g.resolution_deg();
      const double lon = static_cast<double>(j) * g.resolution_deg();
      const double eps = 1e-9;
      if (lat < lat_min - eps || lat > lat_max + eps) continue;
      const bool in_lon = wraps ? (lon >= lon_min - eps || lon <= lon_max + eps)
                                : (lon >= lon_min - eps && lon <= lon_max + eps);
      if (!in_lon) continue;
      if (prior && radius_km) {
        const double r = std::numbers::pi / 180.0;
        const double c = std::sin(prior->lat * r) * std::sin(lat * r) +
                         std::cos(prior->lat * r) * std::cos(lat * r) * std::cos((lon - prior->lon) * r);
        const double d = 6371.0 * std::acos(std::clamp(c, -1.0, 1.0));
        if (d > *radius_km) continue;
      }
      const float v = msl[i * g.lon_count() + j];
      if (!best || v < best_v) {
        best = LatLon{lat, lon};
        best_v = v;
      }
    }
  }
  return best;
}

/// Great-circle distance via 3-D chord length: d = 2R asin(|p - q| / 2).
inline double chord_distance_km(const LatLon& a, const LatLon& b) {
  const double r = std::numbers::pi / 180.0;
  const double ax = std::cos(a.lat * r) * std::cos(a.lon * r), ay = std::cos(a.lat * r) * std::sin(a.lon * r),
               az = std::sin(a.lat * r);
  const double bx = std::cos(b.lat * r) * std::cos(b.lon * r), by = std::cos(b.lat * r) * std::sin(b.lon * r),
               bz = std::sin(b.lat * r);
  const double chord = std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by) + (az - bz) * (az - bz));
  return 2.0 * 6371.0 * std::asin(std::min(1.0, chord / 2.0));
}

inline double mte(const Trajectory& pred, const Trajectory& truth) {
  long double sum = 0.0L;
  for (std::size_t k = 0; k < pred.size(); ++k) sum += chord_distance_km(pred[k].position(), truth[k].position());
  return static_cast<double>(sum / static_cast<long double>(pred.size()));
}

struct Moments {
  double mean, std, skewness, excess_kurtosis;
};

/// Two-pass central moments in long double.
inline Moments moments(const std::vector<double>& x) {
  const auto n = static_cast<long double>(x.size());
  long double s = 0.0L;
  for (double v : x) s += v;
  const long double mean = s / n;
  long double m2 = 0.0L, m3 = 0.0L, m4 = 0.0L;
  for (double v : x) {
    const long double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(m2)),
          static_cast<double>(m3 / std::pow(m2, 1.5L)), static_cast<double>(m4 / (m2 * m2) - 3.0L)};
}

/// Quantile by full sort and linear interpolation between order statistics.
inline double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const long double h = static_cast<long double>(p) * static_cast<long double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= x.size()) return x.back();
  return static_cast<double>(x[lo] + (h - static_cast<long double>(lo)) * (static_cast<long double>(x[lo + 1]) - x[lo]));
}

/// Lower median by (MTE, seed, level, trial) via insertion sort of successful records.
inline TrialRecord median(const std::vector<TrialRecord>& records) {
  auto key = [](const TrialRecord& r) { return std::tuple(*r.mte_km, r.seed, r.level_index, r.trial); };
  std::vector<TrialRecord> ok;
  for (const auto& r : records) {
    if (r.status != TrialStatus::Ok || !r.mte_km) continue;
    auto pos = ok.begin();
    while (pos != ok.end() && key(*pos) < key(r)) ++pos;
    ok.insert(pos, r);
  }
  return ok.at((ok.size() - 1) / 2);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace wxr::oracle
