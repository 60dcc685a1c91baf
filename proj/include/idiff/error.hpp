#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace idiff {

/// Coarse error categories; the CLI maps them onto process exit codes.
enum class ErrorCategory { argument, numeric, io };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// Argument-type errors (exit code 2).

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorCategory::argument, what) {}
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(ErrorCategory::argument, what) {}
};

class BandwidthError : public Error {
public:
    explicit BandwidthError(double h)
        : Error(ErrorCategory::argument, "bandwidth must be positive, got " + std::to_string(h)) {}
};

class GridMismatchError : public Error {
public:
    explicit GridMismatchError(const std::string& what) : Error(ErrorCategory::argument, what) {}
};

class InsufficientDataError : public Error {
public:
    explicit InsufficientDataError(const std::string& what) : Error(ErrorCategory::argument, what) {}
};

/// A structural precondition of a beta-admissibility inequality does not hold,
/// so the inequality has no meaning (distinct from evaluating to false).
class ConditionNotApplicable : public Error {
public:
    explicit ConditionNotApplicable(const std::string& what) : Error(ErrorCategory::argument, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::argument, what) {}
};

// Numeric errors (exit code 3).

class DivergenceError : public Error {
public:
    explicit DivergenceError(std::size_t step)
        : Error(ErrorCategory::numeric, "non-finite state at step " + std::to_string(step)),
          step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class InvalidEstimateError : public Error {
public:
    InvalidEstimateError(std::size_t replication, std::size_t point)
        : Error(ErrorCategory::numeric, "NaN estimate at replication " + std::to_string(replication) +
                                            ", point " + std::to_string(point)),
          replication_(replication), point_(point) {}

    std::size_t replication() const noexcept { return replication_; }
    std::size_t point() const noexcept { return point_; }

private:
    std::size_t replication_;
    std::size_t point_;
};

/// Wraps a failure inside one replication of an experiment cell.
class CellFailure : public Error {
public:
    CellFailure(ErrorCategory category, const std::string& what) : Error(category, what) {}
};

// I/O errors (exit code 4).

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

inline int exit_code(ErrorCategory category) noexcept {
    switch (category) {
    case ErrorCategory::argument: return 2;
    case ErrorCategory::numeric: return 3;
    case ErrorCategory::io: return 4;
    }
    return 1;
}

}  // namespace idiff
