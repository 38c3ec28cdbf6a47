/**
 * @file timeline.hpp
 * @brief Marker matching, affine clock fitting and reference-timeline merging.
 *
 * Every recording device stamps samples with its own free-running clock. The
 * stimulation source emits sequence-numbered markers that each device records
 * on its clock as well; pairing those markers by sequence number gives
 * (t_device, t_reference) points from which an affine map
 *
 *     t_reference = scale * t_device + offset
 *
 * is fitted by ordinary least squares. Constant delivery latency on a device
 * is absorbed into the offset.
 */
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hazsync::timeline {

/// Identifier of a clock domain (a device id, or "reference").
struct ClockId {
  std::string name;

  friend auto operator<=>(const ClockId&, const ClockId&) = default;
};

inline const ClockId kReferenceClock{"reference"};

/// A time in seconds tagged with the clock it is expressed in.
class Timestamp {
 public:
  /// Throws std::invalid_argument when value is not finite.
  Timestamp(double value, ClockId clock);

  double value() const noexcept { return value_; }
  const ClockId& clock() const noexcept { return clock_; }

  /// Ordering is only defined within one clock; throws ClockMismatch otherwise.
  std::partial_ordering compare(const Timestamp& other) const;
  bool operator<(const Timestamp& other) const { return compare(other) < 0; }
  bool operator==(const Timestamp& other) const { return compare(other) == 0; }

 private:
  double value_;
  ClockId clock_;
};

struct Marker {
  std::uint64_t seq = 0;
  double t_device = 0.0;

  friend bool operator==(const Marker&, const Marker&) = default;
};

struct MarkerPair {
  std::uint64_t seq = 0;
  double t_device = 0.0;
  double t_reference = 0.0;

  friend bool operator==(const MarkerPair&, const MarkerPair&) = default;
};

/// Affine device-to-reference clock map.
struct ClockModel {
  double scale = 1.0;
  double offset = 0.0;
  double residual_rms = 0.0;
  std::size_t n_markers = 0;

  static ClockModel identity() { return {1.0, 0.0, 0.0, 2}; }

  friend bool operator==(const ClockModel&, const ClockModel&) = default;
};

/// Pairs markers whose seq appears in both lists. Dropped markers on either
/// side are skipped. Throws NoCommonMarkers when nothing pairs up.
std::vector<MarkerPair> match_markers(std::span<const Marker> device_markers,
                                      std::span<const Marker> reference_markers);

/// Ordinary least squares of t_reference on t_device.
/// Throws InsufficientMarkers (< 2 pairs) or DegenerateFit (no spread in
/// t_device, or non-positive slope).
ClockModel fit_clock_map(std::span<const MarkerPair> pairs);

inline double to_reference(const ClockModel& model, double t_device) {
  return model.scale * t_device + model.offset;
}

inline double to_device(const ClockModel& model, double t_reference) {
  return (t_reference - model.offset) / model.scale;
}

/// One record of the merged timeline. The payload stays in the caller's
/// stream; this refers back to it by device and source index.
struct AlignedRecord {
  std::string device_id;
  std::size_t source_index = 0;
  double t_reference = 0.0;

  friend bool operator==(const AlignedRecord&, const AlignedRecord&) = default;
};

/// Per-device sample times on the device clock, keyed by device id.
using StreamTimes = std::map<std::string, std::vector<double>>;

/// Remaps every stream through its model and merges them into one timeline
/// sorted by reference time, ties broken by device id then source index.
/// Throws MissingModel if a stream has no model.
std::vector<AlignedRecord> align_streams(const StreamTimes& streams,
                                         const std::map<std::string, ClockModel>& models);

struct ScalarSample {
  double t = 0.0;
  double value = 0.0;
};

/// Linear interpolation over a time-sorted channel. Throws OutOfRange outside
/// [first.t, last.t] or on an empty channel.
double interpolate_at(std::span<const ScalarSample> channel, double t);

}  // namespace hazsync::timeline
