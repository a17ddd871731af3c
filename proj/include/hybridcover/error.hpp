#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hc {

enum class ErrorKind {
    InvalidArgument,
    Config,
    Data,
    Numerical,
    Domain,
    UndefinedMoment,
    DimensionMismatch,
    Io,
    Fit,
};

// Base of every exception thrown by the library. The kind drives the C API
// status code and the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class UndefinedMomentError : public Error {
public:
    explicit UndefinedMomentError(const std::string& what) : Error(ErrorKind::UndefinedMoment, what) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(ErrorKind::DimensionMismatch, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

// Raised when no start of the likelihood maximizer converged. Carries the best
// point seen so callers can still inspect it.
class FitError : public Error {
public:
    FitError(const std::string& what, std::vector<double> best_params, double best_log_likelihood)
        : Error(ErrorKind::Fit, what),
          best_params_(std::move(best_params)),
          best_log_likelihood_(best_log_likelihood) {}

    const std::vector<double>& best_params() const noexcept { return best_params_; }
    double best_log_likelihood() const noexcept { return best_log_likelihood_; }

private:
    std::vector<double> best_params_;
    double best_log_likelihood_;
};

}  // namespace hc
