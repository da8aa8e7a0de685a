#include "wxr/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_set>

#include "wxr/error.hpp"

namespace wxr {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "invalid argument";
    case Errc::EmptyRegion: return "empty region";
    case Errc::IncompatibleFieldsets: return "incompatible fieldsets";
    case Errc::NonFinite: return "non-finite state";
    case Errc::Io: return "i/o error";
    case Errc::BadMagic: return "bad magic";
    case Errc::BadVersion: return "bad version";
    case Errc::DimMismatch: return "dim mismatch";
    case Errc::CatalogMismatch: return "catalog mismatch";
    case Errc::TruncatedPayload: return "truncated payload";
    case Errc::IncompleteStats: return "incomplete stats";
    case Errc::DegenerateStd: return "degenerate std";
    case Errc::MissingStats: return "missing stats";
    case Errc::BadDistributionSpec: return "bad distribution spec";
    case Errc::UnknownVariable: return "unknown variable";
    case Errc::NoCandidatePoints: return "no candidate points";
    case Errc::UnalignedTrajectories: return "unaligned trajectories";
    case Errc::EmptyField: return "empty field";
    case Errc::AllTrialsFailed: return "all trials failed";
    case Errc::BadConfig: return "bad config";
    case Errc::BackendProcessFailed: return "backend process failed";
    case Errc::BadBackendOutput: return "bad backend output";
    case Errc::BackendTimeout: return "backend timeout";
    case Errc::BackendNonFinite: return "backend produced non-finite state";
  }
  return "unknown error";
}

namespace {

struct LevelVariable {
  const char* prefix;
  const char* description;
  const char* units;
};

constexpr LevelVariable kLevelVariables[] = {
    {"z", "Geopotential height", "m"},
    {"t", "Temperature", "K"},
    {"u", "Zonal wind", "m/s"},
    {"v", "Meridional wind", "m/s"},
    {"rh", "Relative humidity", "%"},
};

bool iequals_prefix(std::string_view name, std::string_view prefix) {
  if (prefix.size() > name.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), name.begin(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
  });
}

}  // namespace

VariableCatalog::VariableCatalog(std::vector<VariableDef> entries) : entries_(std::move(entries)) {
  std::unordered_set<std::string> seen;
  for (const auto& e : entries_) {
    if (e.name.empty() || e.name.size() > 255) {
      throw Error(Errc::InvalidArgument, "variable name must be 1..255 bytes");
    }
    if (!seen.insert(e.name).second) {
      throw Error(Errc::InvalidArgument, "duplicate variable name: " + e.name);
    }
  }
}

std::optional<std::size_t> VariableCatalog::find(std::string_view name) const noexcept {
  for (std::size_t c = 0; c < entries_.size(); ++c) {
    if (entries_[c].name == name) return c;
  }
  return std::nullopt;
}

std::size_t VariableCatalog::index_of(std::string_view name) const {
  if (auto c = find(name)) return *c;
  throw Error(Errc::UnknownVariable, "unknown variable: " + std::string(name));
}

std::vector<std::size_t> VariableCatalog::channels_with_prefix(std::string_view prefix) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < entries_.size(); ++c) {
    if (iequals_prefix(entries_[c].name, prefix)) out.push_back(c);
  }
  return out;
}

bool VariableCatalog::operator==(const VariableCatalog& other) const noexcept {
  return std::equal(entries_.begin(), entries_.end(), other.entries_.begin(), other.entries_.end(),
                    [](const VariableDef& a, const VariableDef& b) {
                      return a.name == b.name && a.level_hpa == b.level_hpa;
                    });
}

VariableCatalog build_catalog() {
  std::vector<VariableDef> entries = {
      {"u10m", "Zonal wind 10 m above the surface", "m/s", std::nullopt},
      {"u100m", "Zonal wind 100 m above the surface", "m/s", std::nullopt},
      {"v10m", "Meridional wind 10 m above the surface", "m/s", std::nullopt},
      {"v100m", "Meridional wind 100 m above the surface", "m/s", std::nullopt},
      {"t2m", "Temperature 2 m above the surface", "K", std::nullopt},
      {"sp", "Surface pressure", "Pa", std::nullopt},
      {"msl", "Mean sea level pressure", "Pa", std::nullopt},
      {"tcwv", "Total column water vapor", "kg/m^2", std::nullopt},
  };
  for (const auto& var : kLevelVariables) {
    for (int level : kPressureLevels) {
      entries.push_back({std::string(var.prefix) + std::to_string(level),
                         std::string(var.description) + " at " + std::to_string(level) + " hPa", var.units,
                         level});
    }
  }
  return VariableCatalog(std::move(entries));
}

const VariableCatalog& catalog() {
  static const VariableCatalog instance = build_catalog();
  return instance;
}

std::span<const std::size_t> humidity_channels() {
  static const std::vector<std::size_t> channels = catalog().channels_with_prefix("rh");
  return channels;
}

std::size_t msl_channel() {
  static const std::size_t c = catalog().index_of("msl");
  return c;
}

}  // namespace wxr
