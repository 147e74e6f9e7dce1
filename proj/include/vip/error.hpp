#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vip {

enum class ErrorCode {
  BadParam,
  EmptyPointSet,
  ImageTooSmall,
  DegenerateQuad,
  DegenerateTarget,
  DegenerateTransform,
  UnknownElement,
  CyclicGraph,
  BadDocument,
  AssetMissing,
  DecodeError,
  BadConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

// All recoverable failures in the engine surface as vip::Error. `detail()`
// carries the payload the caller usually needs (a JSON pointer for
// BadDocument, a path for AssetMissing, "file: offset N" for DecodeError).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace vip
