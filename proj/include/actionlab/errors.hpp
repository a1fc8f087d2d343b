#pragma once

#include <stdexcept>
#include <string>

namespace actionlab {

// Error taxonomy. Every failure mode surfaced by the library maps onto one of
// these classes so callers (CLI, bindings, tests) can translate category ->
// exit status without string matching. All derive from ActionlabError.

struct ActionlabError : std::runtime_error {
    explicit ActionlabError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration or parameter value supplied by the caller.
struct ConfigError : ActionlabError {
    explicit ConfigError(const std::string& msg) : ActionlabError(msg) {}
};

// Array/matrix dimensions inconsistent with the grid.
struct ShapeError : ActionlabError {
    explicit ShapeError(const std::string& msg) : ActionlabError(msg) {}
};

// Input outside the mathematical domain of an operation
// (e.g. negative-power observable on an action that can reach zero).
struct DomainError : ActionlabError {
    explicit DomainError(const std::string& msg) : ActionlabError(msg) {}
};

// An explicitly documented size/limit was exceeded (combinatorial guards).
struct LimitError : ActionlabError {
    explicit LimitError(const std::string& msg) : ActionlabError(msg) {}
};

// An iterative or numerical procedure failed to converge / lost definiteness.
struct NumericalError : ActionlabError {
    explicit NumericalError(const std::string& msg) : ActionlabError(msg) {}
};

// Not enough data to produce a statistically meaningful estimate.
struct StatisticsError : ActionlabError {
    explicit StatisticsError(const std::string& msg) : ActionlabError(msg) {}
};

// Requested operation is valid but not supported by the selected backend.
struct UnsupportedError : ActionlabError {
    explicit UnsupportedError(const std::string& msg) : ActionlabError(msg) {}
};

// Filesystem / IO failure.
struct IoError : ActionlabError {
    explicit IoError(const std::string& msg) : ActionlabError(msg) {}
};

}  // namespace actionlab
