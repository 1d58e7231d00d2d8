#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rotbonnet {

enum class ErrorCode {
    ConfigError,
    ExistenceViolation,
    NonPositiveRadius,
    OutOfDomain,
    StepTooLarge,
    BoundaryStencil,
    DomainEscape,
    RankDeficient,
    FrameFlip,
    LiftHypothesisViolated,
    CurvatureTooLarge,
    GramDrift,
    NotSubmersion,
    LeafSpread,
    TooFewSamples,
    DegenerateDirection,
    SphereEscape,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ExistenceViolation: return "ExistenceViolation";
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::BoundaryStencil: return "BoundaryStencil";
    case ErrorCode::DomainEscape: return "DomainEscape";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::FrameFlip: return "FrameFlip";
    case ErrorCode::LiftHypothesisViolated: return "LiftHypothesisViolated";
    case ErrorCode::CurvatureTooLarge: return "CurvatureTooLarge";
    case ErrorCode::GramDrift: return "GramDrift";
    case ErrorCode::NotSubmersion: return "NotSubmersion";
    case ErrorCode::LeafSpread: return "LeafSpread";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::SphereEscape: return "SphereEscape";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace rotbonnet
