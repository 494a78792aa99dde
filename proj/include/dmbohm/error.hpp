#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dmbohm {

enum class ErrorCode {
  BadParam,
  BoundaryLeak,
  GridMismatch,
  BadEnsemble,
  DimMismatch,
  BadState,
  BadTime,
  BinMismatch,
  BadIndex,
  BadConfig,
  EmptyEnsemble,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying one of the library's error codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParam: return "BadParam";
    case ErrorCode::BoundaryLeak: return "BoundaryLeak";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::BadEnsemble: return "BadEnsemble";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::BadState: return "BadState";
    case ErrorCode::BadTime: return "BadTime";
    case ErrorCode::BinMismatch: return "BinMismatch";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
  }
  return "Unknown";
}

}  // namespace dmbohm
