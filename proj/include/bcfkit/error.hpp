// error.hpp — exception hierarchy shared by all bcfkit modules

#pragma once

#include <stdexcept>
#include <string>

namespace bcfkit {

// Coarse classification; the CLI maps these onto exit codes.
enum class ErrorKind { Validation, Numerical, NotSupported, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

// Argument outside the mathematical domain of an operation (e.g. log of ω ≤ 0).
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidTemperature : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// An SD pole sits on (or numerically next to) a pole of the coth expansion.
class PoleCollision : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Iterative procedure gave up; carries the best error estimate it reached.
class NoConvergence : public NumericalError {
public:
    NoConvergence(const std::string& what, double achieved)
        : NumericalError(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Divergent integral (e.g. Huang-Rhys factor of an ohmic density).
class Divergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UnresolvedSpectrum : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotSupported : public Error {
public:
    explicit NotSupported(const std::string& what) : Error(ErrorKind::NotSupported, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

} // namespace bcfkit
