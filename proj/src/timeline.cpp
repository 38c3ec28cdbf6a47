#include "hazsync/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <stdexcept>
#include <tuple>

#include "hazsync/error.hpp"

namespace hazsync::timeline {

Timestamp::Timestamp(double value, ClockId clock) : value_(value), clock_(std::move(clock)) {
  if (!std::isfinite(value_)) {
    throw std::invalid_argument("timestamp on clock '" + clock_.name + "' is not finite");
  }
}

std::partial_ordering Timestamp::compare(const Timestamp& other) const {
  if (clock_ != other.clock_) {
    throw ClockMismatch("cannot compare a '" + clock_.name + "' timestamp with a '" +
                        other.clock_.name + "' timestamp");
  }
  return value_ <=> other.value_;
}

std::vector<MarkerPair> match_markers(std::span<const Marker> device_markers,
                                      std::span<const Marker> reference_markers) {
  std::vector<MarkerPair> pairs;
  auto dev = device_markers.begin();
  auto ref = reference_markers.begin();
  while (dev != device_markers.end() && ref != reference_markers.end()) {
    if (dev->seq < ref->seq) {
      ++dev;
    } else if (ref->seq < dev->seq) {
      ++ref;
    } else {
      pairs.push_back({dev->seq, dev->t_device, ref->t_device});
      ++dev;
      ++ref;
    }
  }
  if (pairs.empty()) {
    throw NoCommonMarkers("no marker sequence number is shared with the reference stream");
  }
  return pairs;
}

ClockModel fit_clock_map(std::span<const MarkerPair> pairs) {
  if (pairs.size() < 2) {
    throw InsufficientMarkers("clock fit needs at least 2 marker pairs, got " +
                              std::to_string(pairs.size()));
  }
  const auto n = static_cast<double>(pairs.size());
  double mean_dev = 0.0;
  double mean_ref = 0.0;
  for (const auto& p : pairs) {
    mean_dev += p.t_device;
    mean_ref += p.t_reference;
  }
  mean_dev /= n;
  mean_ref /= n;

  // Centered sums keep the normal equations well conditioned for large t.
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : pairs) {
    const double dx = p.t_device - mean_dev;
    sxx += dx * dx;
    sxy += dx * (p.t_reference - mean_ref);
  }
  if (!(sxx > 0.0)) {
    throw DegenerateFit("all marker device times are equal");
  }
  const double scale = sxy / sxx;
  if (!(scale > 0.0)) {
    throw DegenerateFit("fitted clock scale is not positive");
  }
  const double offset = mean_ref - scale * mean_dev;

  double sq = 0.0;
  for (const auto& p : pairs) {
    const double r = p.t_reference - (scale * p.t_device + offset);
    sq += r * r;
  }
  return {scale, offset, std::sqrt(sq / n), pairs.size()};
}

std::vector<AlignedRecord> align_streams(const StreamTimes& streams,
                                         const std::map<std::string, ClockModel>& models) {
  std::size_t total = 0;
  for (const auto& [id, times] : streams) {
    if (!models.contains(id)) {
      throw MissingModel("no clock model for device '" + id + "'");
    }
    total += times.size();
  }

  std::vector<AlignedRecord> merged;
  merged.reserve(total);
  for (const auto& [id, times] : streams) {
    const ClockModel& model = models.at(id);
    for (std::size_t i = 0; i < times.size(); ++i) {
      merged.push_back({id, i, to_reference(model, times[i])});
    }
  }
  std::sort(merged.begin(), merged.end(), [](const AlignedRecord& a, const AlignedRecord& b) {
    return std::tie(a.t_reference, a.device_id, a.source_index) <
           std::tie(b.t_reference, b.device_id, b.source_index);
  });
  return merged;
}

double interpolate_at(std::span<const ScalarSample> channel, double t) {
  if (channel.empty()) {
    throw OutOfRange("cannot interpolate an empty channel");
  }
  if (!(t >= channel.front().t && t <= channel.back().t)) {
    throw OutOfRange("time " + std::to_string(t) + " outside [" +
                     std::to_string(channel.front().t) + ", " + std::to_string(channel.back().t) +
                     "]");
  }
  auto hi = std::lower_bound(channel.begin(), channel.end(), t,
                             [](const ScalarSample& s, double v) { return s.t < v; });
  if (hi->t == t) {
    return hi->value;
  }
  auto lo = std::prev(hi);
  const double w = (t - lo->t) / (hi->t - lo->t);
  return lo->value + w * (hi->value - lo->value);
}

}  // namespace hazsync::timeline
