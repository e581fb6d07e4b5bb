#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mildito {

/// Precondition on an argument of a numerical routine was violated.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A hypothesis that makes a series or a bound finite does not hold
/// (e.g. r <= 1/4 for the smoothing operator, beta + eps >= -1/4 for the embedding).
class DivergenceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Requested derivative order exceeds the differentiability order of the field.
class OrderError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Operation needs a Hilbert codomain but got an L^p-type one.
class UnsupportedCodomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A moment or integrability hypothesis evaluated on simulated data is not finite.
class HypothesisViolatedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite state during time stepping.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(int step, std::uint64_t path)
        : std::runtime_error("non-finite state at step " + std::to_string(step) + " of path " +
                             std::to_string(path)),
          step_(step),
          path_(path) {}

    int step() const noexcept { return step_; }
    std::uint64_t path() const noexcept { return path_; }

private:
    int step_;
    std::uint64_t path_;
};

}  // namespace mildito
