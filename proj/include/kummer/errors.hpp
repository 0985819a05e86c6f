#pragma once

#include <stdexcept>
#include <string>

namespace kummer {

// Argument outside the mathematical domain of an operation (bad parameter,
// point outside the support, malformed tree, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A requested moment does not exist for the given parameters.  The message
// names the violated bound, e.g. "moment requires s > -a (s=-2, a=1)".
class MomentDomainError : public DomainError {
public:
    using DomainError::DomainError;
};

// A theorem precondition on regression constants is violated.  The message
// cites the inequality from the theorem statement.
class ConstraintError : public DomainError {
public:
    using DomainError::DomainError;
};

// Adaptive quadrature ran out of subdivisions before reaching the tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double lo, double hi, double achieved)
        : std::runtime_error(msg), interval_lo(lo), interval_hi(hi), achieved_tol(achieved) {}

    double interval_lo;
    double interval_hi;
    double achieved_tol;
};

// Rejection sampler whose acceptance rate collapsed.
class SamplerDegenerateError : public std::runtime_error {
public:
    SamplerDegenerateError(const std::string& msg, unsigned long long trials,
                           unsigned long long accepts)
        : std::runtime_error(msg), trials(trials), accepts(accepts) {}

    unsigned long long trials;
    unsigned long long accepts;
};

// Malformed or undersized user input (files, CSV rows, sample sizes).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A series was cut off before its tail bound dropped below the tolerance.
class SeriesTruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kummer
