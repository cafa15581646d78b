#pragma once

#include <stdexcept>
#include <string>

namespace noma {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class ParameterDomainError : public Error {
public:
    using Error::Error;
};

/// Path loss evaluated at the origin.
class SingularDistanceError : public Error {
public:
    using Error::Error;
};

/// Vᴴ R_T V is not positive definite.
class DegeneratePrecoderError : public Error {
public:
    using Error::Error;
};

/// A power allocation cannot support the requested rates under SIC.
/// Carries the first offending (stream, user) pair, both 1-based.
class InfeasibleAllocationError : public Error {
public:
    InfeasibleAllocationError(const std::string& what, int stream, int user)
        : Error(what), stream_(stream), user_(user) {}
    int stream() const noexcept { return stream_; }
    int user() const noexcept { return user_; }

private:
    int stream_;
    int user_;
};

/// The residue series was asked to evaluate beyond its permitted argument.
class RangeRefusalError : public Error {
public:
    using Error::Error;
};

/// A series failed to converge within its term budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class AccuracyNotReachedError : public Error {
public:
    AccuracyNotReachedError(const std::string& what, double estimate, double error_bound)
        : Error(what), estimate_(estimate), error_bound_(error_bound) {}
    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

/// A channel draw whose effective Gram matrix is numerically singular.
class DegenerateDrawError : public Error {
public:
    using Error::Error;
};

/// Two independently implemented forms of the same decision disagreed.
class ConsistencyFault : public Error {
public:
    using Error::Error;
};

/// Bad configuration input. `line` is 0 when the value came from a flag.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string key, int line)
        : Error(what), key_(std::move(key)), line_(line) {}
    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

}  // namespace noma
