#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipwvar {

// Machine-readable failure causes. The names are stable: they appear in
// replicate records and in CLI error lines.
enum class ErrorCode {
  NonConvergence,
  SingularInformation,
  DegenerateResponse,
  SingularGram,
  DimensionMismatch,
  KnownProbabilityMisuse,
  NoSolution,
  BracketFailure,
  ZeroReference,
  MissingColumn,
  NonNumeric,
  MissingInRespondent,
  MissingInResponseCovariate,
  InvalidArgument,
  UnknownScenario,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ipwvar
