#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppmm {

enum class ErrorCode {
    InvalidArgument,
    Parse,
    NonPositiveVariance,
    NotPositiveDefinite,
    NotStrictlyPositiveDefinite,
    RankDeficientDesign,
    InsufficientPattern,
    EmptyColumn,
    DegenerateProxy,
    InvalidIdentification,
    NotStrictlyPositiveResidual,
    Separation,
    RankDeficient,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Input problems (bad files, bad moments) versus numerical invalidity of
    // an otherwise well-formed request.
    bool is_input_error() const noexcept;

private:
    ErrorCode code_;
};

}  // namespace ppmm
