#pragma once

#include <stdexcept>
#include <string>

namespace ldplab {

enum class ErrorCode {
  Parameter,
  Domain,
  Protocol,
  NotApplicable,
  Ingestion,
  Io,
  EmptyInput,
  DegeneratePartition,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parameter: return "parameter";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Protocol: return "protocol";
    case ErrorCode::NotApplicable: return "not_applicable";
    case ErrorCode::Ingestion: return "ingestion";
    case ErrorCode::Io: return "io";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::DegeneratePartition: return "degenerate_partition";
  }
  return "unknown";
}

}  // namespace ldplab
