#ifndef CDK_ERRORS_HPP
#define CDK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cdk {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad arguments, unparsable text, inconsistent configuration.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ParseError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// The requested basis would exceed the configured maximum size.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A moment was requested for a coordinate without a closed-form rule.
class UndefinedMomentError : public Error {
public:
    using Error::Error;
};

/// A tail bound was requested for a weight rule without a uniform bound.
class NoAnalyticBoundError : public Error {
public:
    using Error::Error;
};

/// Base for failures of the numerical pipeline (exit code 3 in the CLI).
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public NumericalError {
public:
    SingularMatrixError(const std::string& what, std::size_t deficient)
        : NumericalError(what), deficient_(deficient) {}

    std::size_t deficient_count() const noexcept { return deficient_; }

private:
    std::size_t deficient_;
};

class EigenSolverError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// K(z,z) is too small to invert.
class DegenerateEvaluationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The geometry does not certify the witness polynomial as an upper bound.
class WitnessInvalidError : public Error {
public:
    using Error::Error;
};

/// No positive distance between the query point and the set could be certified.
class CertificationError : public Error {
public:
    using Error::Error;
};

}  // namespace cdk

#endif
