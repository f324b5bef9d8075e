#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainorder {

// Every failure surfaced by the library carries one of these codes. The C API
// maps them one-to-one onto co_status values.
enum class ErrorCode {
  invalid_argument,
  shape,        // dimension mismatch between operands
  cache,        // stale or mismatched activation record
  domain,       // value outside the domain of a density (variance <= 0, p on {0,1})
  numeric,      // non-finite intermediate
  kind,         // continuous/binary mismatch
  permutation,  // not a bijection on {0..n-1}
  size,         // too few / too many elements for the operation
  config,
  io,
  parse,        // malformed file
  version,
  dimension,    // internally inconsistent model or dataset
  training,
  episode,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when the training loop meets a non-finite likelihood. Carries the
// step and the (from, to) batch-local dataset indices of the offending pair.
class TrainingError : public Error {
 public:
  TrainingError(std::size_t step, std::size_t from, std::size_t to, const std::string& what)
      : Error(ErrorCode::training, what), step_(step), from_(from), to_(to) {}
  std::size_t step() const noexcept { return step_; }
  std::size_t from() const noexcept { return from_; }
  std::size_t to() const noexcept { return to_; }

 private:
  std::size_t step_, from_, to_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace chainorder
