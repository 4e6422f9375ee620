#pragma once

#include <stdexcept>
#include <string>

namespace orient3d {

// Error taxonomy. The CLI maps these onto process exit codes:
//   ParamError / LimitError            -> 2 (bad arguments / outside supported envelope)
//   FormatError / DataError / DimError -> 3 (unreadable, ill-formed or incompatible data)
//   StabilityError / NumericError      -> 4 (stability bound violated, non-finite values)

struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested size/order outside the supported envelope.
struct LimitError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// File-level problems: bad magic, bad version, truncated payload, malformed header.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Content-level problems: non-finite samples, inconsistent header fields.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched shapes between operands (volume vs stack, score vs stack, ...).
struct DimError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Explicit time-step (or similar) violates a stability bound.
struct StabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values produced or encountered mid-computation.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace orient3d
