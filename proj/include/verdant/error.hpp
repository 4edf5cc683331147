#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace verdant {

// Every failure the engine can report. Each maps to exactly one machine
// string (see code_name) and one HTTP status in the service layer.
enum class ErrorCode {
  InvalidInput,
  MissingFile,
  MalformedHeader,
  MissingSpecies,
  DimensionMismatch,
  InvalidGeometry,
  DuplicateId,
  InsufficientExif,
  AmbiguousCamera,
  InvalidCalibration,
  EmptyMask,
  DbhRowEmpty,
  TreeOutsideScene,
  MissingTreeLst,
  InsufficientBaseline,
  InvalidPolygon,
  NoValidCells,
  UnknownArchetype,
  InvalidWeights,
  SnapFailure,
  NoRoute,
  NoLoop,
  NotFound,
  Conflict,
  Internal,
};

std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace verdant
