#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wxr/field_set.hpp"
#include "wxr/variable_stats.hpp"

namespace wxr {

/// `.wxs` snapshot layout (all integers little-endian):
///
///   offset  size  field
///        0     8  magic "WXSTATE1"
///        8     2  version (u16)
///       10     4  lat_count (u32)
///       14     4  lon_count (u32)
///       18     4  channel_count (u32, must be 73)
///       22     8  valid_time, Unix seconds UTC (i64)
///       30     4  resolution in microdegrees (u32)
///       34     -  channel_count x { name length (u8), ASCII name }
///
/// followed by channel_count * lat_count * lon_count float32 values ordered
/// (channel, lat, lon) row-major.
inline constexpr std::array<char, 8> kStateMagic{'W', 'X', 'S', 'T', 'A', 'T', 'E', '1'};
inline constexpr std::uint16_t kStateVersion = 1;
inline constexpr std::size_t kStateFixedHeaderBytes = 34;

struct StateFileHeader {
  std::uint16_t version = kStateVersion;
  std::uint32_t lat_count = 0;
  std::uint32_t lon_count = 0;
  std::uint32_t channel_count = 0;
  std::int64_t valid_time = 0;
  std::uint32_t resolution_microdeg = 0;
  std::vector<std::string> names;

  /// Bytes occupied by the header including the variable table.
  std::size_t byte_size() const noexcept;
  std::size_t payload_bytes() const noexcept {
    return std::size_t{4} * channel_count * lat_count * lon_count;
  }
};

/// Size of the header that write_state emits for the fixed catalog.
std::size_t state_header_bytes();

void write_state(const std::filesystem::path& path, const FieldSet& fs);

/// Writes raw values with the catalog header. Refuses non-finite values with
/// wxr::Error(NonFinite, "non-finite state ...").
void write_state_values(const std::filesystem::path& path, const GridSpec& grid, TimePoint valid_time,
                        std::span<const float> values);

/// Reads and validates the header only.
StateFileHeader read_state_header(const std::filesystem::path& path);

/// Errors: "bad magic", "bad version", "dim mismatch", "catalog mismatch",
/// "truncated payload", each with the byte offset at which validation failed.
FieldSet read_state(const std::filesystem::path& path);

/// Plain-text `name,mean,std` per catalog channel, shortest round-trip decimals.
std::string format_stats(const VariableStats& stats);
VariableStats parse_stats(std::string_view text);

void write_stats(const std::filesystem::path& path, const VariableStats& stats);
/// Errors: "incomplete stats" when any catalog variable is missing,
/// "degenerate std" when std <= 0.
VariableStats read_stats(const std::filesystem::path& path);

}  // namespace wxr
