#pragma once

#include <stdexcept>
#include <string>

namespace mavd {

enum class ErrorCode {
  kInvalidArgument,
  kIndexOutOfRange,
  kDomain,
  kNumericalOverflow,
  kConvergence,
  kUnsupported,
  kAssumptionViolated,
  kConfig,
  kIo,
  kSchema,
  kDiverged,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when the hull QP hits its iteration cap; carries the duality gap
// that was reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double gap)
      : Error(ErrorCode::kConvergence, what), gap_(gap) {}

  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

// Non-finite or runaway state during integration.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step)
      : Error(ErrorCode::kDiverged, what), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace mavd
