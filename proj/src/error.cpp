#include <grpsel/error.hpp>

namespace grpsel {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::ConstantColumn: return "ConstantColumn";
        case ErrorCode::EmptyCategory: return "EmptyCategory";
        case ErrorCode::MissingValue: return "MissingValue";
        case ErrorCode::NonBinaryResponse: return "NonBinaryResponse";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::IllPosed: return "IllPosed";
        case ErrorCode::TooFewObservations: return "TooFewObservations";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::ConstantVector: return "ConstantVector";
        case ErrorCode::DegenerateMargin: return "DegenerateMargin";
        case ErrorCode::EmptyScreenResult: return "EmptyScreenResult";
        case ErrorCode::EmptyActiveSet: return "EmptyActiveSet";
        case ErrorCode::OneClassOnly: return "OneClassOnly";
        case ErrorCode::TooFewMinority: return "TooFewMinority";
        case ErrorCode::InvalidDesign: return "InvalidDesign";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept
{
    switch (code) {
        case ErrorCode::IllPosed:
        case ErrorCode::NumericalFailure:
        case ErrorCode::DegenerateMargin:
            return false;
        default:
            return true;
    }
}

} // namespace grpsel
