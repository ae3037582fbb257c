#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments outside an operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Matrix or clip dimensions do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Text input could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A byte stream failed validation (magic, version, checksum, truncation, ranges).
class DecodeError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace mtc
