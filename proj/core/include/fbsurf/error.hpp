#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbsurf {

enum class ErrorCategory {
    Format,
    Topology,
    DegenerateGeometry,
    InvalidParameter,
    InvalidGeometry,
    Configuration,
    SolverFailure,
    StaleCache,
    SpectralDomain,
    StructureMismatch,
    Io,
    VerificationFailed,
};

/// Stable, machine-readable name of an error category (used by the CLI).
std::string_view category_name(ErrorCategory category);

/// Process exit code associated with a category; never 0.
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message);

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Parse failure at a specific line of an input file.
class FormatError : public Error {
public:
    FormatError(const std::string& message, long line);

    long line() const noexcept { return line_; }

private:
    long line_;
};

/// Eigensolver ran out of budget; carries the worst relative residual reached.
class SolverError : public Error {
public:
    SolverError(const std::string& message, double residual);

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace fbsurf
