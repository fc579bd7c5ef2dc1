#include "sparsepc/error.hpp"

namespace sparsepc {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::NotCentered: return "NotCentered";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NormViolation: return "NormViolation";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorKind::PowerIterationDegenerate: return "PowerIterationDegenerate";
    case ErrorKind::RankExhausted: return "RankExhausted";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::ZeroAfterTruncation: return "ZeroAfterTruncation";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::AllCellsFailed: return "AllCellsFailed";
    case ErrorKind::InvalidBlock: return "InvalidBlock";
    case ErrorKind::NotPD: return "NotPD";
    case ErrorKind::UndefinedMetric: return "UndefinedMetric";
  }
  return "Unknown";
}

}  // namespace sparsepc
