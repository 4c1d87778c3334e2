#include "fbsurf/error.hpp"

namespace fbsurf {

std::string_view category_name(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::Format: return "format-error";
        case ErrorCategory::Topology: return "topology-error";
        case ErrorCategory::DegenerateGeometry: return "degenerate-geometry";
        case ErrorCategory::InvalidParameter: return "invalid-parameter";
        case ErrorCategory::InvalidGeometry: return "invalid-geometry";
        case ErrorCategory::Configuration: return "configuration-error";
        case ErrorCategory::SolverFailure: return "solver-failure";
        case ErrorCategory::StaleCache: return "stale-cache";
        case ErrorCategory::SpectralDomain: return "spectral-domain";
        case ErrorCategory::StructureMismatch: return "structure-mismatch";
        case ErrorCategory::Io: return "io-error";
        case ErrorCategory::VerificationFailed: return "verification-failed";
    }
    return "unknown";
}

int exit_code(ErrorCategory category) {
    return 10 + static_cast<int>(category);
}

Error::Error(ErrorCategory category, const std::string& message)
    : std::runtime_error(message), category_(category) {}

FormatError::FormatError(const std::string& message, long line)
    : Error(ErrorCategory::Format, "line " + std::to_string(line) + ": " + message), line_(line) {}

SolverError::SolverError(const std::string& message, double residual)
    : Error(ErrorCategory::SolverFailure, message + " (relative residual " + std::to_string(residual) + ")"),
      residual_(residual) {}

}  // namespace fbsurf
