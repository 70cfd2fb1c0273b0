#include "shellforge/error.hpp"

namespace shellforge {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::InvalidTransform: return "InvalidTransform";
        case ErrorCode::NotWatertight: return "NotWatertight";
        case ErrorCode::GridTooLarge: return "GridTooLarge";
        case ErrorCode::PitchMismatch: return "PitchMismatch";
        case ErrorCode::DeltaExceedsPadding: return "DeltaExceedsPadding";
        case ErrorCode::SpecInvalid: return "SpecInvalid";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::AmbiguousCorrespondence: return "AmbiguousCorrespondence";
        case ErrorCode::HighResidual: return "HighResidual";
        case ErrorCode::DetectionFailed: return "DetectionFailed";
        case ErrorCode::PlaneMiss: return "PlaneMiss";
        case ErrorCode::WindowOffPiece: return "WindowOffPiece";
        case ErrorCode::BracketOutsideCavity: return "BracketOutsideCavity";
        case ErrorCode::BossOffWall: return "BossOffWall";
        case ErrorCode::ZeroLengthPath: return "ZeroLengthPath";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DeviceMismatch: return "DeviceMismatch";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UsageError: return "UsageError";
    }
    return "UnknownError";
}

}  // namespace shellforge
