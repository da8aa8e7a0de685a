#include "wxr/variable_stats.hpp"

#include <cmath>

#include "wxr/error.hpp"

namespace wxr {

VariableStats::VariableStats(std::vector<ChannelStats> entries) : entries_(std::move(entries)) {
  if (entries_.size() != kChannelCount) {
    throw Error(Errc::MissingStats, "missing stats: expected " + std::to_string(kChannelCount) + " entries, got " +
                                        std::to_string(entries_.size()));
  }
}

std::vector<std::string> VariableStats::degenerate_channels() const {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < entries_.size(); ++c) {
    const auto& s = entries_[c];
    if (!(s.std > 0.0) || !std::isfinite(s.std) || !std::isfinite(s.mean)) out.push_back(catalog()[c].name);
  }
  return out;
}

void VariableStats::validate() const {
  if (entries_.size() != kChannelCount) throw Error(Errc::MissingStats, "missing stats");
  const auto bad = degenerate_channels();
  if (!bad.empty()) {
    std::string names;
    for (const auto& n : bad) names += (names.empty() ? "" : ", ") + n;
    throw Error(Errc::DegenerateStd, "degenerate std: " + names);
  }
}

}  // namespace wxr
