#pragma once

#include <stdexcept>
#include <string>

namespace tdw {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class MonotonicityError : public Error {
public:
    using Error::Error;
};

/// Newton iteration failed; carries the last residual norm.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double final_residual)
        : Error(what), final_residual_(final_residual) {}
    double final_residual() const noexcept { return final_residual_; }

private:
    double final_residual_;
};

/// Requested speed is below the proven lower bound c_lin.
class InvalidSpeed : public Error {
public:
    using Error::Error;
};

class NoWaveBelowMinimalSpeed : public Error {
public:
    using Error::Error;
};

class WindowTooShort : public Error {
public:
    using Error::Error;
};

class DerivativeFloorError : public Error {
public:
    using Error::Error;
};

class StabilityViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class FileFormatError : public Error {
public:
    using Error::Error;
};

}  // namespace tdw
