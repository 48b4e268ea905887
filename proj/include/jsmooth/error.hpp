#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace jsmooth {

// Error categories map one-to-one onto C API status codes and CLI exit codes.
enum class ErrorKind {
    Usage = 1,      // bad argument, precondition violated
    Data = 2,       // malformed / inconsistent input data, I/O
    Numerical = 3,  // solver failure, degenerate numerics
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// Eigensolver gave up; carries the residual norms of the wanted Ritz pairs.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, std::vector<double> residuals)
        : NumericalError(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Non-fatal diagnostics (truncated d, non-positive eigenvalues, ...) go through
/// this sink. Default writes to stderr; tests and the C API may redirect it.
using WarningSink = void (*)(const std::string& message);

void set_warning_sink(WarningSink sink) noexcept;
void warn(const std::string& message);

}  // namespace jsmooth
