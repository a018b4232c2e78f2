#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace netcoh {

/// Error categories double as process exit codes for the CLI.
enum class ErrorKind { Input = 1, Numeric = 2, Resource = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exitCode() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string &what) : Error(ErrorKind::Input, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string &what) : Error(ErrorKind::Numeric, what) {}
};

class ResourceError : public Error {
public:
    explicit ResourceError(const std::string &what) : Error(ErrorKind::Resource, what) {}
};

/**
 * Raised by path completion when a directed cycle has nonpositive penalized
 * cost, which makes the set of admissible paths infinite. The offending
 * cycle is carried as a node-id sequence (first node repeated at the end).
 */
class DivergentCompletion : public ResourceError {
public:
    DivergentCompletion(const std::string &what, std::vector<std::string> cycle)
        : ResourceError(what), cycle_(std::move(cycle)) {}

    const std::vector<std::string> &cycle() const noexcept { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

} // namespace netcoh
