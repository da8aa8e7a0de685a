#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wxr/catalog.hpp"

namespace wxr {

struct ChannelStats {
  double mean = 0.0;
  double std = 0.0;

  bool operator==(const ChannelStats&) const = default;
};

/// Per-variable mean and standard deviation, one entry per catalog channel.
class VariableStats {
 public:
  VariableStats() : entries_(kChannelCount) {}
  explicit VariableStats(std::vector<ChannelStats> entries);

  const ChannelStats& operator[](std::size_t c) const { return entries_.at(c); }
  ChannelStats& operator[](std::size_t c) { return entries_.at(c); }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Names of channels with std <= 0 or non-finite moments.
  std::vector<std::string> degenerate_channels() const;

  /// Throws wxr::Error(MissingStats) on wrong size, wxr::Error(DegenerateStd)
  /// if any std <= 0.
  void validate() const;

  bool operator==(const VariableStats&) const = default;

 private:
  std::vector<ChannelStats> entries_;
};

}  // namespace wxr
