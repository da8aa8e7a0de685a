#include "wxr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wxr/rng.hpp"

namespace wxr {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Standard-atmosphere height (m) of a pressure surface.
double standard_height(double p_hpa) { return 44330.8 * (1.0 - std::pow(p_hpa / 1013.25, 0.190263)); }

struct Baseline {
  double mean;
  double spread;
};

Baseline baseline(const VariableDef& v, double lat) {
  const double c = std::cos(lat * kDeg);
  const std::string& n = v.name;
  if (v.single_layer()) {
    if (n == "t2m") return {250.0 + 50.0 * c, 4.0};
    if (n == "sp") return {98000.0 + 1500.0 * c, 300.0};
    if (n == "msl") return {101325.0 + 900.0 * std::cos(2.0 * lat * kDeg), 250.0};
    if (n == "tcwv") return {3.0 + 45.0 * c * c, 4.0};
    // 10 m / 100 m winds: easterlies in the tropics, westerlies in mid-latitudes.
    if (n[0] == 'u') return {-6.0 * std::cos(3.0 * lat * kDeg), 3.0};
    return {0.0, 3.0};
  }
  const double p = *v.level_hpa;
  const double z = standard_height(p);
  switch (n[0]) {
    case 'z': return {z * (0.985 + 0.03 * c), 20.0 + z * 0.002};
    case 't': return {std::max(215.0, 288.15 - 0.0065 * z) - 25.0 * (1.0 - c), 2.5};
    case 'u': return {(p < 400.0 ? 25.0 : 8.0) * std::sin(2.0 * lat * kDeg) * std::sin(2.0 * lat * kDeg), 5.0};
    case 'v': return {0.0, 4.0};
    default: return {p >= 500.0 ? 45.0 + 30.0 * c : 8.0 + 10.0 * c, 12.0};  // relative humidity
  }
}

}  // namespace

FieldSet make_synthetic_state(const GridSpec& grid, TimePoint valid_time, const SyntheticOptions& options) {
  const std::size_t nlat = grid.lat_count();
  const std::size_t nlon = grid.lon_count();
  const std::size_t n = grid.point_count();
  std::vector<float> values(kChannelCount * n);
  const std::size_t msl = msl_channel();
  const std::size_t sp = catalog().index_of("sp");

  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const VariableDef& v = catalog()[c];
    auto rng = CounterRng::substream(options.seed, c);
    const double phase = rng.uniform01() * 2.0 * std::numbers::pi;
    const int wavenumber = 2 + static_cast<int>(c % 4);
    float* dst = values.data() + c * n;
    for (std::size_t i = 0; i < nlat; ++i) {
      const double lat = grid.lat_of(i);
      const Baseline b = baseline(v, lat);
      for (std::size_t j = 0; j < nlon; ++j) {
        const double lon = grid.lon_of(j);
        double value = b.mean + b.spread * std::sin(wavenumber * lon * kDeg + phase) * std::cos(lat * kDeg);
        value += options.texture * b.spread * (2.0 * rng.uniform01() - 1.0);
        if (c == msl || c == sp) {
          double dlon = std::abs(lon - options.storm_center.lon);
          dlon = std::min(dlon, 360.0 - dlon) * std::cos(options.storm_center.lat * kDeg);
          const double dlat = lat - options.storm_center.lat;
          const double r2 = (dlat * dlat + dlon * dlon) / (options.storm_radius_deg * options.storm_radius_deg);
          value -= options.storm_depth_pa * std::exp(-0.5 * r2);
        }
        if (v.name.starts_with("rh")) value = std::clamp(value, 0.0, 100.0);
        dst[i * nlon + j] = static_cast<float>(value);
      }
    }
  }
  return FieldSet(grid, valid_time, std::move(values));
}

}  // namespace wxr
