#pragma once

#include <stdexcept>
#include <string>

namespace ham {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical budget (evaluations, cells, truncation order) was exhausted.
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, double partial = 0.0, double error_estimate = 0.0)
        : std::runtime_error(what), partial_(partial), error_estimate_(error_estimate) {}
    double partial() const { return partial_; }
    double error_estimate() const { return error_estimate_; }

private:
    double partial_;
    double error_estimate_;
};

// A stated inequality or invariant failed beyond its numerical slack.
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or incomplete configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The requested quantity is not defined for the scenario's regime.
class UnsupportedRegime : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonPsdError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ham
