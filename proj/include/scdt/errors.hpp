// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace scdt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A step function or sample vector that must be non-decreasing is not.
class NotMonotoneError : public Error {
public:
    using Error::Error;
};

/// Positive and negative parts of a signed measure share an atom location.
class InvalidDecompositionError : public Error {
public:
    using Error::Error;
};

/// Pushed-forward Jordan channels of a transform tuple are not mutually singular.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Argument outside the admissible domain (grid range, probability level, ...).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Measure does not satisfy a precondition on its mass (probability, nonzero, ...).
class MassError : public Error {
public:
    using Error::Error;
};

/// Reference measure that is not atomless or not strictly increasing.
class ReferenceError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or specification string.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Scatter matrix is singular even after regularization.
class DegenerateScatterError : public Error {
public:
    using Error::Error;
};

} // namespace scdt
