#pragma once

#include <stdexcept>
#include <string>

namespace esim {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition (bad coordinates, |v| >= c, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// The event pair has an absolute temporal order, so no boost can reverse it.
class NotSpacelike : public Error {
public:
    using Error::Error;
};

// An id that does not resolve (exchange, node, event).
class UnknownId : public Error {
public:
    using Error::Error;
};

// A causal structure that physics forbids: superluminal message edges or cycles.
class CausalityViolation : public Error {
public:
    using Error::Error;
};

// Scenario or config problem. `where` names the field path or file:line.
class ConfigError : public Error {
public:
    ConfigError(std::string where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

}  // namespace esim
