#pragma once

#include <stdexcept>
#include <string>

namespace geoscatter {

enum class ErrorCode {
  DegenerateMetric,
  Domain,
  Precondition,
  PossibleTrapping,
  Stiffness,
  OutOfDomain,
  Usage,
  CorruptData,
  InsufficientData,
  IdNotFound,
  AmbiguousLocalization,
  NotInjective,
  SingularChart,
  ChartFailure,
  IncompatibleBoundary,
  Inconclusive,
  Parse,
  Io,
  NonConvex,
};

// Stable machine-readable tag, e.g. "E_TRAPPING".
const char* code_tag(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace geoscatter
