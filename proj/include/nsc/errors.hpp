#pragma once

#include <stdexcept>
#include <string>

namespace nsc {

// Violated precondition or invalid configuration. Maps to CLI exit code 2.
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// Non-finite values, positivity loss, or any other breakdown of a run.
// Maps to CLI exit code 3.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

// File-system or serialization failure. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Two independent numerical routes disagree beyond tolerance.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A measured quantity contradicts an inequality that should hold on its
// stated validity region.
class LemmaViolation : public std::runtime_error {
public:
    explicit LemmaViolation(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw PreconditionError(message);
}

}  // namespace nsc
