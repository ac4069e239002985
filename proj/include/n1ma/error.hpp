#pragma once

#include <stdexcept>
#include <string>

namespace n1ma {

/// Base for every error raised by the library. The message is prefixed with
/// "module::operation: " so the CLI can report where a failure came from.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string operation, const std::string& what)
        : std::runtime_error(module + "::" + operation + ": " + what),
          module_(std::move(module)),
          operation_(std::move(operation)) {}

    [[nodiscard]] const std::string& module() const noexcept { return module_; }
    [[nodiscard]] const std::string& operation() const noexcept { return operation_; }

private:
    std::string module_;
    std::string operation_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation at a singular point (e.g. the pole of G_{n-1} at the origin).
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// alpha_u left the positive cone where the operator is elliptic.
class PositivityError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or field file. `line` is 0 when not applicable.
class ConfigError : public Error {
public:
    ConfigError(std::string operation, const std::string& what, int line = 0)
        : Error("cli", std::move(operation),
                line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace n1ma
