#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

// Argument outside an operation's domain (negative time, empty input, k = 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Model or input data fails a structural requirement (nonintegrable kernel,
// bad mark distribution, unknown config key).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// alpha * m_{b,1} * ||phi||_1 >= 1.
class StabilityError : public ValidationError {
public:
    explicit StabilityError(const std::string& what)
        : ValidationError("stability violated: " + what) {}
};

// Event cap exceeded during simulation.
class ExplosionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Path lacks the candidate log required for coupled re-simulation.
class UnsupportedPathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hawkes
