#include "verdant/error.hpp"

namespace verdant {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MissingSpecies: return "MissingSpecies";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InsufficientExif: return "InsufficientExif";
    case ErrorCode::AmbiguousCamera: return "AmbiguousCamera";
    case ErrorCode::InvalidCalibration: return "InvalidCalibration";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::DbhRowEmpty: return "DbhRowEmpty";
    case ErrorCode::TreeOutsideScene: return "TreeOutsideScene";
    case ErrorCode::MissingTreeLst: return "MissingTreeLst";
    case ErrorCode::InsufficientBaseline: return "InsufficientBaseline";
    case ErrorCode::InvalidPolygon: return "InvalidPolygon";
    case ErrorCode::NoValidCells: return "NoValidCells";
    case ErrorCode::UnknownArchetype: return "UnknownArchetype";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::SnapFailure: return "SnapFailure";
    case ErrorCode::NoRoute: return "NoRoute";
    case ErrorCode::NoLoop: return "NoLoop";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

}  // namespace verdant
