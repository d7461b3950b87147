#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csp {

enum class ErrorKind {
    InvalidData,
    GridTooSmall,
    DecayViolation,
    IntegrationBlowup,
    SingularSpectralPoint,
    SpectralSingularity,
    ToleranceExceeded,
    InvalidSpectrum,
    DegenerateConfiguration,
    NotSingleValued,
    OnCut,
    InsufficientTable,
    PoleAtZero,
    WrongSector,
    Blowup,
    MeanNotZero,
    WindowEmpty,
    ConfigError,
    IoError,
};

constexpr std::string_view to_string(ErrorKind k) noexcept {
    switch (k) {
    case ErrorKind::InvalidData: return "InvalidData";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::DecayViolation: return "DecayViolation";
    case ErrorKind::IntegrationBlowup: return "IntegrationBlowup";
    case ErrorKind::SingularSpectralPoint: return "SingularSpectralPoint";
    case ErrorKind::SpectralSingularity: return "SpectralSingularity";
    case ErrorKind::ToleranceExceeded: return "ToleranceExceeded";
    case ErrorKind::InvalidSpectrum: return "InvalidSpectrum";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::NotSingleValued: return "NotSingleValued";
    case ErrorKind::OnCut: return "OnCut";
    case ErrorKind::InsufficientTable: return "InsufficientTable";
    case ErrorKind::PoleAtZero: return "PoleAtZero";
    case ErrorKind::WrongSector: return "WrongSector";
    case ErrorKind::Blowup: return "Blowup";
    case ErrorKind::MeanNotZero: return "MeanNotZero";
    case ErrorKind::WindowEmpty: return "WindowEmpty";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable kind and an optional measured value.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double value = 0.0)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), value_(value) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Measured defect, time of blowup, condition estimate, ... depending on kind.
    double value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    double value_;
};

/// True for failures of the numerics rather than of the caller.
constexpr bool is_numerical(ErrorKind k) noexcept {
    switch (k) {
    case ErrorKind::IntegrationBlowup:
    case ErrorKind::SpectralSingularity:
    case ErrorKind::ToleranceExceeded:
    case ErrorKind::DegenerateConfiguration:
    case ErrorKind::NotSingleValued:
    case ErrorKind::Blowup:
        return true;
    default:
        return false;
    }
}

} // namespace csp
