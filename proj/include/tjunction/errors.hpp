#pragma once

#include <stdexcept>
#include <string>

namespace tj {

/// Inputs that cannot describe a valid configuration (coincident minima,
/// overlapping boundary arcs, grids that are too coarse, ...).
class InvalidConfiguration : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The potential leaves the admissible class, e.g. the surface tensions
/// violate a strict triangle inequality.
class HypothesisViolation : public std::runtime_error {
public:
    HypothesisViolation(const std::string& what, std::string offending)
        : std::runtime_error(what), offending_(std::move(offending)) {}

    /// Label of the offending item, e.g. "23" for the pair (2,3).
    const std::string& offending() const noexcept { return offending_; }

private:
    std::string offending_;
};

/// A numeric self-check did not hold.
class VerificationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tj
