#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blowup {

enum class ErrorCode {
    InvalidArgument,
    StepOverflow,
    NegativeState,
    InsufficientData,
    MaskTouchesBoundary,
    MaskWhereVVanishes,
    NotABlowupPoint,
    WindowOutOfSupport,
    ZeroTouchesBoundary,
    NotAZero,
    Infeasible,
    Parse,
    Io,
};

inline const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StepOverflow: return "StepOverflow";
    case ErrorCode::NegativeState: return "NegativeState";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::MaskTouchesBoundary: return "MaskTouchesBoundary";
    case ErrorCode::MaskWhereVVanishes: return "MaskWhereVVanishes";
    case ErrorCode::NotABlowupPoint: return "NotABlowupPoint";
    case ErrorCode::WindowOutOfSupport: return "WindowOutOfSupport";
    case ErrorCode::ZeroTouchesBoundary: return "ZeroTouchesBoundary";
    case ErrorCode::NotAZero: return "NotAZero";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Library-wide exception. `code()` identifies the failure class so callers
/// (the harness in particular) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the integrator; carries the grid node where the step failed.
class StepError : public Error {
public:
    StepError(ErrorCode code, std::size_t node, const std::string& what)
        : Error(code, what + " at node " + std::to_string(node)), node_(node)
    {
    }

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

inline void require(bool condition, ErrorCode code, const std::string& what)
{
    if (!condition)
        throw Error(code, what);
}

} // namespace blowup
