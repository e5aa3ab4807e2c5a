#pragma once

#include <stdexcept>
#include <string>

namespace ybfact {

// Typed failure modes. Operations whose correctness proofs need generic
// inputs refuse degenerate ones with one of these instead of returning a
// silently wrong answer.
enum class ErrorKind {
    DegenerateSpectrum,
    NoConvergence,
    SpectraOverlap,
    SingularLambda,
    PartitionMismatch,
    DegenerateInstance,
    OutsideDomain,
    DimensionMismatch,
    ZeroCountMismatch,
    DegenerateZeros,
    NonUniqueSolution,
    QuotientResidual,
    InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SpectraOverlap: return "SpectraOverlap";
        case ErrorKind::SingularLambda: return "SingularLambda";
        case ErrorKind::PartitionMismatch: return "PartitionMismatch";
        case ErrorKind::DegenerateInstance: return "DegenerateInstance";
        case ErrorKind::OutsideDomain: return "OutsideDomain";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ZeroCountMismatch: return "ZeroCountMismatch";
        case ErrorKind::DegenerateZeros: return "DegenerateZeros";
        case ErrorKind::NonUniqueSolution: return "NonUniqueSolution";
        case ErrorKind::QuotientResidual: return "QuotientResidual";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

}  // namespace ybfact
