#pragma once

#include <stdexcept>
#include <string>

namespace vbh {

enum class ErrorKind {
    DivisionByZero,
    MixedExtension,
    PoleAtPoint,
    NonSquareRoot,
    NotPolynomial,
    NonHomogeneous,
    UnverifiedStructure,
    ZeroMetricEntry,
    NotBihamiltonian,
    WrongBidegree,
    NotSingleVariable,
    NotACocycle,
    NotHomogeneousScaling,
    IrreducibilityViolated,
    ConformalityFailed,
    DegenerateScaling,
    RootNotRegistered,
    WrongShape,
    UnknownSpace,
    SystemTooLarge,
    SyntaxError,
    IndexOutOfRange,
    ValidationError,
    Internal,
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::MixedExtension: return "MixedExtension";
        case ErrorKind::PoleAtPoint: return "PoleAtPoint";
        case ErrorKind::NonSquareRoot: return "NonSquareRoot";
        case ErrorKind::NotPolynomial: return "NotPolynomial";
        case ErrorKind::NonHomogeneous: return "NonHomogeneous";
        case ErrorKind::UnverifiedStructure: return "UnverifiedStructure";
        case ErrorKind::ZeroMetricEntry: return "ZeroMetricEntry";
        case ErrorKind::NotBihamiltonian: return "NotBihamiltonian";
        case ErrorKind::WrongBidegree: return "WrongBidegree";
        case ErrorKind::NotSingleVariable: return "NotSingleVariable";
        case ErrorKind::NotACocycle: return "NotACocycle";
        case ErrorKind::NotHomogeneousScaling: return "NotHomogeneousScaling";
        case ErrorKind::IrreducibilityViolated: return "IrreducibilityViolated";
        case ErrorKind::ConformalityFailed: return "ConformalityFailed";
        case ErrorKind::DegenerateScaling: return "DegenerateScaling";
        case ErrorKind::RootNotRegistered: return "RootNotRegistered";
        case ErrorKind::WrongShape: return "WrongShape";
        case ErrorKind::UnknownSpace: return "UnknownSpace";
        case ErrorKind::SystemTooLarge: return "SystemTooLarge";
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) {
    throw Error(kind, detail);
}

} // namespace vbh
