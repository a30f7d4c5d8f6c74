#pragma once

#include <stdexcept>
#include <string>

namespace lehc {

// Input outside a function's mathematical domain (non-finite x, u not in (0,1), ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed or inconsistent censoring scheme.
class SchemeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unreadable or invalid input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Base for numeric/model failures. The CLI maps this family to exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateSampleError : public NumericError {
public:
    using NumericError::NumericError;
};

class InsufficientDataError : public NumericError {
public:
    using NumericError::NumericError;
};

class SingularFitError : public NumericError {
public:
    using NumericError::NumericError;
};

// Lindley expansion produced a posterior expectation that cannot be inverted.
class ApproximationError : public NumericError {
public:
    using NumericError::NumericError;
};

// Importance-sampling proposal is improper (d <= sum of failure times).
class ProposalInvalidError : public NumericError {
public:
    using NumericError::NumericError;
};

// Too many alpha-proposal rejections.
class ProposalMismatchError : public NumericError {
public:
    using NumericError::NumericError;
};

class UnreliableIntervalError : public NumericError {
public:
    using NumericError::NumericError;
};

// Broken internal invariant; indicates a bug rather than bad input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace lehc
