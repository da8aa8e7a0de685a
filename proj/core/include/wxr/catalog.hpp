#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wxr {

inline constexpr std::size_t kChannelCount = 73;
inline constexpr std::size_t kSingleLayerCount = 8;
inline constexpr std::array<int, 13> kPressureLevels{50,  100, 150, 200, 250, 300, 400,
                                                     500, 600, 700, 850, 925, 1000};

struct VariableDef {
  std::string name;
  std::string description;
  std::string units;
  /// Pressure level in hPa; empty for single-layer variables.
  std::optional<int> level_hpa;

  bool single_layer() const noexcept { return !level_hpa.has_value(); }
};

/// The fixed 73-channel variable catalog. Channel index c always refers to
/// entries()[c]; every file and in-memory array uses this order.
class VariableCatalog {
 public:
  explicit VariableCatalog(std::vector<VariableDef> entries);

  std::span<const VariableDef> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const VariableDef& operator[](std::size_t channel) const { return entries_.at(channel); }

  std::optional<std::size_t> find(std::string_view name) const noexcept;
  /// Like find() but throws wxr::Error(UnknownVariable).
  std::size_t index_of(std::string_view name) const;

  /// Channels whose name starts with `prefix` (case-insensitive), in catalog order.
  std::vector<std::size_t> channels_with_prefix(std::string_view prefix) const;

  bool operator==(const VariableCatalog& other) const noexcept;

 private:
  std::vector<VariableDef> entries_;
};

/// Builds the catalog: u10m, u100m, v10m, v100m, t2m, sp, msl, tcwv, then
/// z, t, u, v, rh at 50..1000 hPa ascending.
VariableCatalog build_catalog();

/// Process-wide shared instance of build_catalog().
const VariableCatalog& catalog();

/// Relative humidity channels (the only ones with hard physical bounds here).
std::span<const std::size_t> humidity_channels();

std::size_t msl_channel();

}  // namespace wxr
