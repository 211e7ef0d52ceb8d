#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hpstl {

// Root of every error raised by the library; the CLI maps these to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// Formula shape that no engine handles (triple nesting, `=`, nonlinear regions ...).
class UnsupportedShape : public Error {
public:
    using Error::Error;
};

class UnboundPathVariable : public Error {
public:
    using Error::Error;
};

// The truth value depends on the path beyond the sampled horizon.
class HorizonExceeded : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ModelError : public Error {
public:
    using Error::Error;
};

class InvalidRateMatrix : public ModelError {
public:
    using ModelError::ModelError;
};

class NonfiniteState : public ModelError {
public:
    using ModelError::ModelError;
};

class ZenoGuard : public ModelError {
public:
    using ModelError::ModelError;
};

class InfiniteStateSpace : public ModelError {
public:
    using ModelError::ModelError;
};

} // namespace hpstl
