#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace framekit {

enum class ErrorCode {
  EmptyInput,
  DimensionMismatch,
  NonFinite,
  NotSquare,
  NotKFrame,
  NotParseval,
  NotPSD,
  NotPair,
  NotDual,
  NotOneUniform,
  NotTwoUniform,
  Infeasible,
  NotOrthogonal,
  DoesNotCommute,
  IndexOutOfRange,
  BudgetExceeded,
  DependentInput,
  HypothesesNotMet,
  NoConnectedPairAvailable,
  NotKInvariant,
  NoFreeDirections,
  IterationCap,
  DofTooLarge,
  NumericalFailure,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

class FrameError : public std::runtime_error {
 public:
  FrameError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace framekit
