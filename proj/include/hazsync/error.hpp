#pragma once

#include <stdexcept>
#include <string>

namespace hazsync {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// timeline
class NoCommonMarkers : public Error {
 public:
  using Error::Error;
};
class InsufficientMarkers : public Error {
 public:
  using Error::Error;
};
class DegenerateFit : public Error {
 public:
  using Error::Error;
};
class MissingModel : public Error {
 public:
  using Error::Error;
};
class OutOfRange : public Error {
 public:
  using Error::Error;
};
class ClockMismatch : public Error {
 public:
  using Error::Error;
};

// scene / simulator
class PlacementInfeasible : public Error {
 public:
  using Error::Error;
};
class InvalidPlan : public Error {
 public:
  using Error::Error;
};

// analytics
class NoDetections : public Error {
 public:
  using Error::Error;
};

// persistence and configuration
class ConfigError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

/// A clock fit failure attributed to one device.
class SyncError : public Error {
 public:
  SyncError(std::string device_id, const std::string& what)
      : Error("device '" + device_id + "': " + what), device_id_(std::move(device_id)) {}

  const std::string& device_id() const noexcept { return device_id_; }

 private:
  std::string device_id_;
};

}  // namespace hazsync
