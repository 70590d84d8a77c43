#pragma once

#include <stdexcept>
#include <string>

namespace hoqc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter is outside the range an operation is defined on (p <= 1,
/// lambda above its admissible bound, a band limit above N/3, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The gradient of a power kernel was requested at its singular point
/// (mu = 0, p < 2, x = 0).
class SingularPointError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature exceeded its bisection depth without meeting tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// A symmetric-only energy was handed a non-symmetric argument.
class DomainError : public Error {
public:
    using Error::Error;
};

class MissingGradientError : public Error {
public:
    using Error::Error;
};

/// A potential handed to check_lemma4 violates its unit normalization.
class NormalizationError : public Error {
public:
    using Error::Error;
};

/// Korn ratio with a vanishing denominator.
class DegenerateFieldError : public Error {
public:
    using Error::Error;
};

class UnknownEnergyError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

} // namespace hoqc
