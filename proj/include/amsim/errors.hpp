#pragma once

#include <stdexcept>
#include <string>

namespace amsim {

/// Machine-readable failure causes. Every throwing operation in the library
/// reports one of these; the CLI maps them to a parsable error line and
/// exit code 1.
enum class ErrorCode {
    NotSkewSymmetric,
    NotRotation,
    SingularMatrix,
    NonFiniteState,
    DegenerateForce,
    SingularCross,
    OutOfParallelogramRange,
    UnreachableTarget,
    BranchSingularity,
    JointLimit,
    NoConvergence,
    AmbiguousSolution,
    DegenerateData,
    ConfigInvalid,
    IoError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NotSkewSymmetric: return "NotSkewSymmetric";
        case ErrorCode::NotRotation: return "NotRotation";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::DegenerateForce: return "DegenerateForce";
        case ErrorCode::SingularCross: return "SingularCross";
        case ErrorCode::OutOfParallelogramRange: return "OutOfParallelogramRange";
        case ErrorCode::UnreachableTarget: return "UnreachableTarget";
        case ErrorCode::BranchSingularity: return "BranchSingularity";
        case ErrorCode::JointLimit: return "JointLimit";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::AmbiguousSolution: return "AmbiguousSolution";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace amsim
