#include "qnn/errors.hpp"

namespace qnn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::ZeroNormPiece: return "ZeroNormPiece";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::EmptyKeepSet: return "EmptyKeepSet";
    case ErrorCode::RegisterTooLarge: return "RegisterTooLarge";
    case ErrorCode::InvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidEfficiency: return "InvalidEfficiency";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ZeroNormPieceError::ZeroNormPieceError(std::size_t piece, const std::string& what_piece)
    : Error(ErrorCode::ZeroNormPiece,
            what_piece + " piece " + std::to_string(piece) + " has zero norm"),
      piece_(piece) {}

}  // namespace qnn
