#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vizcap {

enum class ErrorCode {
  kParse,
  kEmptyDataset,
  kType,
  kSelection,
  kInsufficientData,
  kDegenerateFit,
  kDegenerateCorrelation,
  kValidation,
  kScaling,
  kParameter,
  kBuild,
  kTierProtocol,
  kBudgetExceeded,
  kAuth,
  kNetwork,
  kBackend,
  kReplayMiss,
  kEmptyCompletion,
  kMode,
  kConfig,
  kIo,
  kEmptyChart,
  kNotFound,
  kConflict,
};

std::string_view ToString(ErrorCode code);

// Every failure raised by the library is an Error carrying a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures keep the 1-based location (row for CSV, byte offset for JSON).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t location);

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

// True for errors that originate in a completion backend rather than the caller.
bool IsGatewayError(ErrorCode code);

}  // namespace vizcap
