#pragma once

#include <stdexcept>
#include <string>

namespace meanslab {

/// Input outside the contract of an operation (bad interval, point outside
/// the domain, non-positive weight, ...). The CLI maps this to exit code 3.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numeric procedure failed: bracket without sign change, iteration cap
/// exceeded, divergent difference quotients.
struct SolveError : std::runtime_error {
    explicit SolveError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace meanslab
