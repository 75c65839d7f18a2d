#pragma once

#include <stdexcept>
#include <string>

namespace bridgekit {

enum class ErrorKind {
    ShapeMismatch,
    DivisionFloorViolated,
    InvalidBounds,
    UncertaintyOutOfRange,
    EndpointVelocityUndefined,
    BetaFloorViolated,
    NonMonotoneBeta,
    PredictorShapeMismatch,
    RestorerShapeMismatch,
    GridOutOfRange,
    DomainError,
    InvalidParameters,
    ZeroVector,
    DegenerateClustering,
    InsufficientPoints,
    InsufficientSamples,
    EmptyDataset,
    DivergenceDetected,
    MissingAnnotation,
    IoError,
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::DivisionFloorViolated: return "DivisionFloorViolated";
        case ErrorKind::InvalidBounds: return "InvalidBounds";
        case ErrorKind::UncertaintyOutOfRange: return "UncertaintyOutOfRange";
        case ErrorKind::EndpointVelocityUndefined: return "EndpointVelocityUndefined";
        case ErrorKind::BetaFloorViolated: return "BetaFloorViolated";
        case ErrorKind::NonMonotoneBeta: return "NonMonotoneBeta";
        case ErrorKind::PredictorShapeMismatch: return "PredictorShapeMismatch";
        case ErrorKind::RestorerShapeMismatch: return "RestorerShapeMismatch";
        case ErrorKind::GridOutOfRange: return "GridOutOfRange";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::InvalidParameters: return "InvalidParameters";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::DegenerateClustering: return "DegenerateClustering";
        case ErrorKind::InsufficientPoints: return "InsufficientPoints";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::DivergenceDetected: return "DivergenceDetected";
        case ErrorKind::MissingAnnotation: return "MissingAnnotation";
        case ErrorKind::IoError: return "IoError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what_arg)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what_arg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

} // namespace bridgekit
