#include "rydcav/error.hpp"

namespace rydcav {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kGridTooCoarse: return "grid-too-coarse";
    case ErrorCode::kMismatchedCarrier: return "mismatched-carrier";
    case ErrorCode::kNoResolvablePeak: return "no-resolvable-peak";
    case ErrorCode::kSingularNormalMatrix: return "singular-normal-matrix";
    case ErrorCode::kModelEvaluationFailure: return "model-evaluation-failure";
    case ErrorCode::kFlatSpectrumUnfittable: return "flat-spectrum-unfittable";
    case ErrorCode::kConfig: return "config-error";
    case ErrorCode::kData: return "data-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rydcav
