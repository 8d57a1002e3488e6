#pragma once

#include <stdexcept>
#include <string>

namespace dirac {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: unknown family, invalid flag combination, missing derivative.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Coulomb coupling at or above |k|, where the origin exponent is complex.
class UnsupportedRegime : public Error {
public:
    using Error::Error;
};

/// The requested eigenstate could not be located.
class NoSuchState : public Error {
public:
    using Error::Error;
};

/// Integrator breakdown; carries the radius where it happened.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double r) : Error(what), radius(r) {}
    double radius;
};

/// Node label changed across a finite-difference stencil.
class LevelCrossing : public Error {
public:
    using Error::Error;
};

/// A theorem precondition (e.g. pointwise ordering of potentials) fails.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Arrays passed to a grid operation do not live on that grid.
class ContractViolation : public Error {
public:
    using Error::Error;
};

} // namespace dirac
