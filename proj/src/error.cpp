#include "chainorder/error.hpp"

namespace chainorder {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::shape: return "shape";
    case ErrorCode::cache: return "cache";
    case ErrorCode::domain: return "domain";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::kind: return "kind";
    case ErrorCode::permutation: return "permutation";
    case ErrorCode::size: return "size";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::version: return "version";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::training: return "training";
    case ErrorCode::episode: return "episode";
  }
  return "unknown";
}

}  // namespace chainorder
