#include "trajzone/error.hpp"

namespace trajzone {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::UnknownFormat: return "unknown_format";
    case ErrorCode::NoValidRows: return "no_valid_rows";
    case ErrorCode::InvalidTrajectory: return "invalid_trajectory";
    case ErrorCode::InvalidCombination: return "invalid_combination";
    case ErrorCode::IdenticalZones: return "identical_zones";
    case ErrorCode::InsufficientMembers: return "insufficient_members";
    case ErrorCode::SingleClass: return "single_class";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

}  // namespace trajzone
