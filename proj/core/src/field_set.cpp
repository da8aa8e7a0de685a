#include "wxr/field_set.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "wxr/error.hpp"

namespace wxr {

FieldSet::FieldSet(GridSpec grid, TimePoint valid_time, std::vector<float> values)
    : grid_(grid), valid_time_(valid_time), values_(std::move(values)) {
  const std::size_t expected = kChannelCount * grid_.point_count();
  if (values_.size() != expected) {
    throw Error(Errc::DimMismatch, "dim mismatch: expected " + std::to_string(expected) + " values, got " +
                                       std::to_string(values_.size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      const std::size_t c = k / grid_.point_count();
      throw Error(Errc::NonFinite, "non-finite state: channel " + catalog()[c].name + " at flat index " +
                                       std::to_string(k));
    }
  }
}

FieldSet FieldSet::filled(GridSpec grid, TimePoint valid_time, float value) {
  return FieldSet(grid, valid_time, std::vector<float>(kChannelCount * grid.point_count(), value));
}

std::span<const float> FieldSet::channel(std::size_t c) const {
  if (c >= kChannelCount) throw Error(Errc::InvalidArgument, "channel index out of range");
  const std::size_t n = grid_.point_count();
  return std::span<const float>(values_).subspan(c * n, n);
}

FieldSet FieldSet::with_time(TimePoint t) const {
  FieldSet copy = *this;
  copy.valid_time_ = t;
  return copy;
}

bool FieldSet::bitwise_equal(const FieldSet& other) const noexcept {
  return grid_ == other.grid_ && valid_time_ == other.valid_time_ && values_.size() == other.values_.size() &&
         std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(float)) == 0;
}

FieldSet field_difference(const FieldSet& a, const FieldSet& b) {
  if (!(a.grid() == b.grid())) throw Error(Errc::IncompatibleFieldsets, "incompatible fieldsets: grid mismatch");
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<float> out(av.size());
  for (std::size_t k = 0; k < av.size(); ++k) out[k] = av[k] - bv[k];
  return FieldSet(a.grid(), a.valid_time(), std::move(out));
}

Trajectory::Trajectory(std::vector<TrackPoint> points) {
  points_.reserve(points.size());
  for (const auto& p : points) push_back(p);
}

void Trajectory::push_back(const TrackPoint& p) {
  if (!points_.empty() && p.time - points_.back().time != kModelTimestep) {
    throw Error(Errc::InvalidArgument, "trajectory points must be spaced by exactly 6 hours");
  }
  points_.push_back(p);
}

}  // namespace wxr
