#pragma once

#include <stdexcept>
#include <string>

namespace bcn {

/// Base class for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied data: malformed matrices, out-of-range indices,
/// inconsistent models.  The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Expression syntax error.  `position` is a 0-based byte offset into the
/// source text.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t position)
        : ValidationError(what), position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// A broken internal invariant: a bug, not bad input.  The CLI maps these
/// to exit code 2.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace bcn
