#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace boostctl {

/// Argument outside the mathematical domain of an operation (non-finite input,
/// non-positive exponent, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration or empty input handed to a harness-level operation.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The numerical maximizer could not bracket a finite supremum.
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A control law produced a non-finite output. `term()` names the offending term.
class ControllerFault : public std::runtime_error {
public:
    ControllerFault(std::string term, const std::string& what)
        : std::runtime_error(what), term_(std::move(term)) {}

    const std::string& term() const noexcept { return term_; }

private:
    std::string term_;
};

/// Non-finite intermediate inside the disturbance observer.
class ObserverFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace boostctl
