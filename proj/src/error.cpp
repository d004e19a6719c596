#include "clickbench/error.hpp"

namespace clickbench {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ActionAfterTermination: return "ActionAfterTermination";
    case Errc::InvalidArguments: return "InvalidArguments";
    case Errc::GenerationFailed: return "GenerationFailed";
    case Errc::UnknownElement: return "UnknownElement";
    case Errc::ConnectFailed: return "ConnectFailed";
    case Errc::ProtocolError: return "ProtocolError";
    case Errc::NavigationTimeout: return "NavigationTimeout";
    case Errc::LoadFailed: return "LoadFailed";
    case Errc::NotFound: return "NotFound";
    case Errc::ZeroArea: return "ZeroArea";
    case Errc::Timeout: return "Timeout";
    case Errc::HttpError: return "HttpError";
    case Errc::EmptyReply: return "EmptyReply";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyDenominator: return "EmptyDenominator";
    case Errc::IoError: return "IoError";
    case Errc::DataFormatError: return "DataFormatError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace clickbench
