#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace teachable {

/// Malformed input file or stream. Carries the 1-based line (or record) number
/// when one is known; 0 otherwise.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A well-formed request or dataset that violates a documented precondition.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The request is valid in general but not in the current state (e.g. a
/// highlight while testing).
class Conflict : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An event log could not be replayed; `index` is the 0-based event position.
class ReplayError : public std::runtime_error {
public:
    ReplayError(const std::string& what, std::size_t index)
        : std::runtime_error(what + " (event " + std::to_string(index) + ")"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace teachable
