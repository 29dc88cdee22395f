#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace afm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSegmentError : public Error {
public:
    using Error::Error;
};

class EmptyMapError : public Error {
public:
    using Error::Error;
};

/// An attraction field map was handed to a transform that does not accept
/// its current state.
class StateError : public Error {
public:
    using Error::Error;
};

class LatticeError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed segment-map content (bad JSON shape, out-of-bounds or
/// degenerate segments).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed binary AFM content. Carries the byte offset where decoding failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// The filesystem refused a read or a write.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace afm
