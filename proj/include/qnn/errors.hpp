#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qnn {

enum class ErrorCode {
  ZeroNorm,
  ZeroNormPiece,
  DimensionMismatch,
  LengthMismatch,
  IndexOutOfRange,
  DuplicateIndex,
  EmptyKeepSet,
  RegisterTooLarge,
  InvalidDensityMatrix,
  InvalidState,
  InvalidEpsilon,
  InvalidProbability,
  InvalidEfficiency,
  InvalidConfig,
  ParseError,
  DivergenceDetected,
};

std::string_view to_string(ErrorCode code);

/// Library error. Every failure raised by qnn carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A partitioned piece (of an input or of a weight vector) has zero norm.
class ZeroNormPieceError : public Error {
 public:
  ZeroNormPieceError(std::size_t piece, const std::string& what_piece);

  std::size_t piece() const noexcept { return piece_; }

 private:
  std::size_t piece_;
};

}  // namespace qnn
