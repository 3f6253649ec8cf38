#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prime_lab {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (x <= 0, P <= 2, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Requested range contains nothing to work with (cutoff < 2).
class EmptyRangeError : public Error {
public:
    using Error::Error;
};

// Request exceeds a configured resource ceiling.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Structurally invalid configuration or input data.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace prime_lab
