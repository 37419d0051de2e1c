#pragma once

#include <stdexcept>
#include <string>

namespace mlsde {

// Invalid parameters or configuration detected before any sampling starts.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Pairwise operations (coarsening, antithetic swap, sign subsampling) need an even step count.
class OddStepCount : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Recoverable per-sample failure. The sampling engine counts these as aborted samples.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NegativeSqrtArgument : public DomainError {
public:
    explicit NegativeSqrtArgument(double value)
        : DomainError("square root of negative variance " + std::to_string(value)), value_(value) {}

    double value() const noexcept { return value_; }

private:
    double value_;
};

// Rate fitting failures.
class ZeroMean : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class IllConditioned : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Plan construction failures.
class ZeroWeakConstant : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NonpositiveVariance : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class MissingLastLevelVariance : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Too many aborted samples at some level.
class SamplingFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mlsde
