#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace terraclass {

enum class ErrorCode {
    Validation,
    MissingKey,
    UnsupportedDataType,
    MalformedHeader,
    SizeMismatch,
    NonFiniteSample,
    DuplicateClassId,
    DuplicateName,
    ColorOutOfRange,
    OutOfBounds,
    DuplicatePixel,
    EmptyRoi,
    InsufficientSamples,
    DegenerateInput,
    SingularCovariance,
    InvalidPriors,
    InvalidConfig,
    UnmappedCluster,
    EmptyMatrix,
    DegenerateChance,
    UnknownSource,
    TargetUndeclared,
    BadWindow,
    NoClassifiedPixels,
    DimensionMismatch,
    MalformedRow,
    OverlappingLayout,
    IncompleteLayout,
    UnknownSubcommand,
};

std::string_view to_string(ErrorCode code);

/// Base of every error the toolkit raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data or arguments. The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    ValidationError(ErrorCode code, const std::string& what)
        : Error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Filesystem failure. The CLI maps these to exit code 2.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("IoError: " + what) {}
};

} // namespace terraclass
