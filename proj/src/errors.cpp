#include "terraclass/errors.hpp"

namespace terraclass {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::UnsupportedDataType: return "UnsupportedDataType";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::DuplicateClassId: return "DuplicateClassId";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::ColorOutOfRange: return "ColorOutOfRange";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::DuplicatePixel: return "DuplicatePixel";
    case ErrorCode::EmptyRoi: return "EmptyRoi";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::InvalidPriors: return "InvalidPriors";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnmappedCluster: return "UnmappedCluster";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::DegenerateChance: return "DegenerateChance";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::TargetUndeclared: return "TargetUndeclared";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::NoClassifiedPixels: return "NoClassifiedPixels";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::OverlappingLayout: return "OverlappingLayout";
    case ErrorCode::IncompleteLayout: return "IncompleteLayout";
    case ErrorCode::UnknownSubcommand: return "UnknownSubcommand";
    }
    return "Error";
}

} // namespace terraclass
