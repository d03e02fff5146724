#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trajzone {

/// Machine-readable failure categories shared by the CLI and the HTTP service.
enum class ErrorCode {
  InvalidArgument,       // malformed input, bad flags
  UnknownFormat,
  NoValidRows,
  InvalidTrajectory,     // e.g. non-positive time delta, too few points
  InvalidCombination,
  IdenticalZones,
  InsufficientMembers,
  SingleClass,
  NotFound,
  Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trajzone
