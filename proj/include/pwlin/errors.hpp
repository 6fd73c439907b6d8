#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pwlin {

/// Base of every domain error raised by the library. The CLI maps these to
/// exit code 1; IoError maps to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An orbit component left the representable range (|value| > 1e300 or
/// non-finite). `index` is the signed iterate index at which it happened.
class OverflowError : public Error {
public:
    OverflowError(std::int64_t index, const std::string& what)
        : Error(what), index_(index) {}
    std::int64_t index() const noexcept { return index_; }

private:
    std::int64_t index_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

class DegenerateMatrixError : public Error {
public:
    using Error::Error;
};

class NoReturnError : public Error {
public:
    using Error::Error;
};

class InconsistentPieceError : public Error {
public:
    using Error::Error;
};

class PeriodicSuspectError : public Error {
public:
    using Error::Error;
};

class CommutationError : public Error {
public:
    using Error::Error;
};

class NoBracketError : public Error {
public:
    using Error::Error;
};

class SignConstraintError : public Error {
public:
    using Error::Error;
};

/// Circle assembly failed for a reason not covered by a more specific error
/// (wrong piece count, conic classes disagree, arcs do not glue).
class ConstructionError : public Error {
public:
    using Error::Error;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace pwlin
