#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elastoblow {

enum class ErrorCode {
    DegenerateDensity,
    NonPositiveDensity,
    GridTooSmall,
    CflViolation,
    InvalidParameters,
    InvalidInitialData,
    InvalidFunctional,
    ConfigError,
    TruncatedFile,
    BadMagic,
    VersionMismatch,
    IoFailure,
};

constexpr auto to_string(ErrorCode code) noexcept -> std::string_view {
    switch (code) {
    case ErrorCode::DegenerateDensity: return "DegenerateDensity";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::InvalidInitialData: return "InvalidInitialData";
    case ErrorCode::InvalidFunctional: return "InvalidFunctional";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] auto code() const noexcept -> ErrorCode { return code_; }

private:
    ErrorCode code_;
};

} // namespace elastoblow
