#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsepc {

enum class ErrorKind {
  EmptyMatrix,
  NotCentered,
  DimensionMismatch,
  NotSymmetric,
  ZeroMatrix,
  DimensionTooLarge,
  IndexOutOfRange,
  NormViolation,
  DegenerateSpectrum,
  NonPositiveEigenvalue,
  PowerIterationDegenerate,
  RankExhausted,
  InvalidParameter,
  ZeroAfterTruncation,
  TooFewSamples,
  AllCellsFailed,
  InvalidBlock,
  NotPD,
  UndefinedMetric,
};

std::string_view error_name(ErrorKind kind) noexcept;

// All library failures surface as this exception; `kind()` is the stable
// machine-readable tag (the CLI prints `error_name(kind())` on stderr).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sparsepc
