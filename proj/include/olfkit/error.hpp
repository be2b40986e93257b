#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace olfkit {

enum class ErrorCode {
  InvalidArgument,
  HorizonExceeded,
  SingularityEncountered,
  JacobianSingular,
  ConvergedAlready,
  UnsupportedRealization,
  ConstructionError,
  DomainViolation,
  OracleFailure,
  OracleAmbiguous,
  SchemaMismatch,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::SingularityEncountered: return "SingularityEncountered";
    case ErrorCode::JacobianSingular: return "JacobianSingular";
    case ErrorCode::ConvergedAlready: return "ConvergedAlready";
    case ErrorCode::UnsupportedRealization: return "UnsupportedRealization";
    case ErrorCode::ConstructionError: return "ConstructionError";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::OracleAmbiguous: return "OracleAmbiguous";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

/// Single exception type for the library; the code tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace olfkit
