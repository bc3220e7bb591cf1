#pragma once

#include <stdexcept>
#include <string>

namespace nonsig {

// Non-finite input or argument outside the mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Contract violation on a caller-supplied value (n < 1, sigma <= 0, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The bracketed function does not change sign on [lo, hi].
class BracketError : public std::runtime_error {
public:
    BracketError(const std::string& what, double lo, double hi, double f_lo, double f_hi)
        : std::runtime_error(what), lo_(lo), hi_(hi), f_lo_(f_lo), f_hi_(f_hi) {}

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double f_lo() const noexcept { return f_lo_; }
    double f_hi() const noexcept { return f_hi_; }

private:
    double lo_, hi_, f_lo_, f_hi_;
};

// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

// Conditioning on an event whose probability underflows.
class DegenerateConditioningError : public std::runtime_error {
public:
    DegenerateConditioningError(const std::string& what, double log_probability)
        : std::runtime_error(what), log_probability_(log_probability) {}

    double log_probability() const noexcept { return log_probability_; }

private:
    double log_probability_;
};

// Monte Carlo conditioning event retained too few draws.
class InsufficientConditioningError : public std::runtime_error {
public:
    InsufficientConditioningError(const std::string& what, long long retained)
        : std::runtime_error(what), retained_(retained) {}

    long long retained() const noexcept { return retained_; }

private:
    long long retained_;
};

}  // namespace nonsig
