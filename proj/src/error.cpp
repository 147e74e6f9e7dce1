#include "vip/error.hpp"

namespace vip {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParam: return "BadParam";
    case ErrorCode::EmptyPointSet: return "EmptyPointSet";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::DegenerateQuad: return "DegenerateQuad";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::DegenerateTransform: return "DegenerateTransform";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::BadDocument: return "BadDocument";
    case ErrorCode::AssetMissing: return "AssetMissing";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(std::move(detail)) {}

}  // namespace vip
