#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clickbench {

enum class Errc {
  ActionAfterTermination,
  InvalidArguments,
  GenerationFailed,
  UnknownElement,
  ConnectFailed,
  ProtocolError,
  NavigationTimeout,
  LoadFailed,
  NotFound,
  ZeroArea,
  Timeout,
  HttpError,
  EmptyReply,
  EmptyInput,
  EmptyDenominator,
  IoError,
  DataFormatError,
};

std::string_view to_string(Errc code);

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Remote transport failures. The runner catches these and marks the episode
/// as an infrastructure failure instead of a task failure.
class InfraFailure : public Error {
 public:
  InfraFailure(Errc code, const std::string& what, int http_status = 0)
      : Error(code, what), http_status_(http_status) {}

  int http_status() const noexcept { return http_status_; }

 private:
  int http_status_;
};

}  // namespace clickbench
