#pragma once

#include <cstdint>

#include "wxr/field_set.hpp"

namespace wxr {

/// Parameters of a smooth, plausible-looking synthetic snapshot with one
/// cyclone-like MSL depression. Used for demos, tests and benchmarks.
struct SyntheticOptions {
  LatLon storm_center{33.0, 285.0};
  /// Central pressure deficit in Pa.
  double storm_depth_pa = 4000.0;
  /// Gaussian e-folding radius in degrees.
  double storm_radius_deg = 3.0;
  /// Amplitude of small-scale texture relative to each variable's spread.
  double texture = 0.05;
  std::uint64_t seed = 1;
};

FieldSet make_synthetic_state(const GridSpec& grid, TimePoint valid_time,
                              const SyntheticOptions& options = {});

}  // namespace wxr
