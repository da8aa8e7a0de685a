#include "wxr/state_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wxr/error.hpp"

namespace wxr {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>(u & 0xFF));
    u = static_cast<U>(u >> 8);
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) u |= static_cast<U>(static_cast<U>(p[b]) << (8 * b));
  return static_cast<T>(u);
}

std::string offset_note(std::size_t offset) { return " (byte offset " + std::to_string(offset) + ")"; }

std::string encode_header(const GridSpec& grid, TimePoint valid_time) {
  std::string h;
  h.append(kStateMagic.data(), kStateMagic.size());
  put_le<std::uint16_t>(h, kStateVersion);
  put_le<std::uint32_t>(h, grid.lat_count());
  put_le<std::uint32_t>(h, grid.lon_count());
  put_le<std::uint32_t>(h, static_cast<std::uint32_t>(kChannelCount));
  put_le<std::int64_t>(h, valid_time.time_since_epoch().count());
  put_le<std::uint32_t>(h, grid.resolution_microdeg());
  for (const auto& v : catalog().entries()) {
    h.push_back(static_cast<char>(v.name.size()));
    h.append(v.name);
  }
  return h;
}

void write_floats_le(std::ofstream& out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  } else {
    std::string buf;
    buf.reserve(values.size_bytes());
    for (float f : values) put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(f));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return in;
}

// Reads exactly n bytes or reports truncation at `offset`.
void read_exact(std::ifstream& in, unsigned char* dst, std::size_t n, std::size_t offset,
                const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(Errc::TruncatedPayload, "truncated payload: " + path.string() + " ends inside the header" +
                                            offset_note(offset + static_cast<std::size_t>(in.gcount())));
  }
}

}  // namespace

std::size_t StateFileHeader::byte_size() const noexcept {
  std::size_t n = kStateFixedHeaderBytes;
  for (const auto& name : names) n += 1 + name.size();
  return n;
}

std::size_t state_header_bytes() {
  static const std::size_t n = encode_header(GridSpec(1'000'000, 1, 1), TimePoint{}).size();
  return n;
}

void write_state_values(const std::filesystem::path& path, const GridSpec& grid, TimePoint valid_time,
                        std::span<const float> values) {
  if (values.size() != kChannelCount * grid.point_count()) {
    throw Error(Errc::DimMismatch, "dim mismatch: value count does not match grid");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw Error(Errc::NonFinite, "non-finite state: refusing to write " + path.string() + " (value index " +
                                       std::to_string(k) + ")");
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  const std::string header = encode_header(grid, valid_time);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  write_floats_le(out, values);
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

void write_state(const std::filesystem::path& path, const FieldSet& fs) {
  write_state_values(path, fs.grid(), fs.valid_time(), fs.values());
}

namespace {

StateFileHeader parse_header(std::ifstream& in, const std::filesystem::path& path) {
  unsigned char fixed[kStateFixedHeaderBytes];
  read_exact(in, fixed, 8, 0, path);
  if (std::memcmp(fixed, kStateMagic.data(), kStateMagic.size()) != 0) {
    throw Error(Errc::BadMagic, "bad magic in " + path.string() + offset_note(0));
  }
  read_exact(in, fixed + 8, kStateFixedHeaderBytes - 8, 8, path);

  StateFileHeader h;
  h.version = get_le<std::uint16_t>(fixed + 8);
  h.lat_count = get_le<std::uint32_t>(fixed + 10);
  h.lon_count = get_le<std::uint32_t>(fixed + 14);
  h.channel_count = get_le<std::uint32_t>(fixed + 18);
  h.valid_time = get_le<std::int64_t>(fixed + 22);
  h.resolution_microdeg = get_le<std::uint32_t>(fixed + 30);

  if (h.version != kStateVersion) {
    throw Error(Errc::BadVersion, "bad version " + std::to_string(h.version) + " in " + path.string() +
                                      offset_note(8));
  }
  if (h.channel_count != kChannelCount) {
    throw Error(Errc::DimMismatch, "dim mismatch: channel_count " + std::to_string(h.channel_count) +
                                       ", expected " + std::to_string(kChannelCount) + offset_note(18));
  }
  try {
    GridSpec(h.resolution_microdeg, h.lat_count, h.lon_count);
  } catch (const Error& e) {
    throw Error(Errc::DimMismatch, std::string("dim mismatch: ") + e.what() + offset_note(10));
  }

  std::size_t offset = kStateFixedHeaderBytes;
  h.names.reserve(h.channel_count);
  for (std::uint32_t c = 0; c < h.channel_count; ++c) {
    unsigned char len = 0;
    read_exact(in, &len, 1, offset, path);
    std::string name(len, '\0');
    read_exact(in, reinterpret_cast<unsigned char*>(name.data()), len, offset + 1, path);
    if (name != catalog()[c].name) {
      throw Error(Errc::CatalogMismatch, "catalog mismatch: channel " + std::to_string(c) + " is '" + name +
                                             "', expected '" + catalog()[c].name + "'" + offset_note(offset));
    }
    offset += 1 + len;
    h.names.push_back(std::move(name));
  }
  return h;
}

}  // namespace

StateFileHeader read_state_header(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_header(in, path);
}

FieldSet read_state(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  const StateFileHeader h = parse_header(in, path);

  std::error_code ec;
  const auto file_size = static_cast<std::size_t>(std::filesystem::file_size(path, ec));
  if (ec) throw Error(Errc::Io, "cannot stat " + path.string());
  const std::size_t header_bytes = h.byte_size();
  const std::size_t expected = h.payload_bytes();
  const std::size_t actual = file_size - header_bytes;
  if (actual < expected) {
    throw Error(Errc::TruncatedPayload, "truncated payload: expected " + std::to_string(expected) +
                                            " bytes after header, found " + std::to_string(actual) +
                                            offset_note(file_size));
  }
  if (actual > expected) {
    throw Error(Errc::DimMismatch, "dim mismatch: " + std::to_string(actual - expected) +
                                       " bytes beyond the declared payload" + offset_note(header_bytes + expected));
  }

  std::vector<float> values(expected / 4);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(expected));
  if (static_cast<std::size_t>(in.gcount()) != expected) {
    throw Error(Errc::TruncatedPayload, "truncated payload: short read" +
                                            offset_note(header_bytes + static_cast<std::size_t>(in.gcount())));
  }
  if constexpr (std::endian::native != std::endian::little) {
    for (auto& f : values) {
      f = std::bit_cast<float>(get_le<std::uint32_t>(reinterpret_cast<const unsigned char*>(&f)));
    }
  }
  GridSpec grid(h.resolution_microdeg, h.lat_count, h.lon_count);
  return FieldSet(grid, TimePoint{std::chrono::seconds{h.valid_time}}, std::move(values));
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(Errc::InvalidArgument, "malformed number '" + std::string(s) + "' on stats line " +
                                           std::to_string(line_no));
  }
  return v;
}

}  // namespace

std::string format_stats(const VariableStats& stats) {
  std::string out;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    out += catalog()[c].name;
    out += ',';
    out += shortest(stats[c].mean);
    out += ',';
    out += shortest(stats[c].std);
    out += '\n';
  }
  return out;
}

VariableStats parse_stats(std::string_view text) {
  std::vector<ChannelStats> entries(kChannelCount);
  std::vector<bool> seen(kChannelCount, false);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw Error(Errc::InvalidArgument, "stats line " + std::to_string(line_no) + " is not name,mean,std");
    }
    const auto channel = catalog().index_of(line.substr(0, c1));
    if (seen[channel]) {
      throw Error(Errc::InvalidArgument, "duplicate stats line for " + catalog()[channel].name);
    }
    seen[channel] = true;
    entries[channel].mean = parse_double(line.substr(c1 + 1, c2 - c1 - 1), line_no);
    entries[channel].std = parse_double(line.substr(c2 + 1), line_no);
  }
  std::string missing;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    if (!seen[c]) missing += (missing.empty() ? "" : ", ") + catalog()[c].name;
  }
  if (!missing.empty()) throw Error(Errc::IncompleteStats, "incomplete stats: missing " + missing);

  VariableStats stats(std::move(entries));
  stats.validate();
  return stats;
}

void write_stats(const std::filesystem::path& path, const VariableStats& stats) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  out << format_stats(stats);
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

VariableStats read_stats(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stats(buf.str());
}

}  // namespace wxr
