#include "ppmm/error.hpp"

namespace ppmm {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::NotStrictlyPositiveDefinite: return "NotStrictlyPositiveDefinite";
        case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
        case ErrorCode::InsufficientPattern: return "InsufficientPattern";
        case ErrorCode::EmptyColumn: return "EmptyColumn";
        case ErrorCode::DegenerateProxy: return "DegenerateProxy";
        case ErrorCode::InvalidIdentification: return "InvalidIdentification";
        case ErrorCode::NotStrictlyPositiveResidual: return "NotStrictlyPositiveResidual";
        case ErrorCode::Separation: return "Separation";
        case ErrorCode::RankDeficient: return "RankDeficient";
    }
    return "Unknown";
}

bool Error::is_input_error() const noexcept {
    switch (code_) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::Parse:
        case ErrorCode::NonPositiveVariance:
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::InsufficientPattern:
        case ErrorCode::EmptyColumn:
            return true;
        default:
            return false;
    }
}

}  // namespace ppmm
