#pragma once

#include <stdexcept>
#include <string>

namespace maass {

// Every failure raised by the library derives from Error so callers can
// catch one type at the boundary (the CLI maps these to exit codes).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Evaluation requested at a pole.
class PoleError : public Error {
public:
    using Error::Error;
};

// A quadrature, series or iteration ran out of budget before meeting its target.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Malformed input file.
class ParseError : public Error {
public:
    using Error::Error;
};

// Data violates a structural invariant (Hecke relations, normalization, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

// Not enough Fourier coefficients to reach the requested accuracy.
class InsufficientCoefficientsError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace maass
