#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rydcav {

enum class ErrorCode {
  kInvalidArgument,
  kGridTooCoarse,
  kMismatchedCarrier,
  kNoResolvablePeak,
  kSingularNormalMatrix,
  kModelEvaluationFailure,
  kFlatSpectrumUnfittable,
  kConfig,
  kData,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// command-line front end can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace rydcav
