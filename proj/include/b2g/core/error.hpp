#pragma once

#include <stdexcept>
#include <string>

namespace b2g {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Raised when input data breaks a model invariant (bad ids, bad bounds, ...).
class ModelError : public Error {
public:
    explicit ModelError(const std::string& message) : Error(message) {}
};

/// Raised by file readers on malformed or unexpected content.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& message) : Error(message) {}
};

}  // namespace b2g
