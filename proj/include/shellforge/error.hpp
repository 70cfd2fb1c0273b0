#pragma once

#include <stdexcept>
#include <string>

namespace shellforge {

enum class ErrorCode {
    // mesh I/O
    TruncatedFile,
    MalformedRecord,
    UnsupportedFeature,
    IndexOutOfRange,
    InvalidTransform,
    // voxel fields
    NotWatertight,
    GridTooLarge,
    PitchMismatch,
    DeltaExceedsPadding,
    // parametric generators
    SpecInvalid,
    // registration
    DegenerateInput,
    AmbiguousCorrespondence,
    HighResidual,
    DetectionFailed,
    // assembly
    PlaneMiss,
    WindowOffPiece,
    BracketOutsideCavity,
    BossOffWall,
    // gesture
    ZeroLengthPath,
    InsufficientData,
    NonFiniteLoss,
    DimensionMismatch,
    DeviceMismatch,
    // general
    IoError,
    UsageError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

// Non-fatal findings attached to results (e.g. thin walls after shelling).
struct Warning {
    std::string code;
    std::string message;
};

}  // namespace shellforge
