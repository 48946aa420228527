#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace grpsel {

enum class ErrorCode
{
    InvalidArgument,
    DimensionMismatch,
    SizeMismatch,
    OutOfRange,
    ConstantColumn,
    EmptyCategory,
    MissingValue,
    NonBinaryResponse,
    EmptyGroup,
    InvalidSpec,
    IllPosed,
    TooFewObservations,
    DegenerateInput,
    ConstantVector,
    DegenerateMargin,
    EmptyScreenResult,
    EmptyActiveSet,
    OneClassOnly,
    TooFewMinority,
    InvalidDesign,
    ParseError,
    IoError,
    NumericalFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Errors that stem from bad input rather than from the numerics.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          code_(code)
    {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace grpsel
