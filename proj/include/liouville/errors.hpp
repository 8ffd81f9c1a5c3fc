#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace liouville {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    ExponentRange,
    BranchCut,
};

/// Parse failure with the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, std::size_t offset, const std::string& msg)
        : Error(msg + " (byte " + std::to_string(offset) + ")"),
          kind_(kind),
          offset_(offset) {}

    ParseErrorKind kind() const { return kind_; }
    std::size_t offset() const { return offset_; }

private:
    ParseErrorKind kind_;
    std::size_t offset_;
};

class PointedError : public Error {
public:
    PointedError(std::complex<double> where, const std::string& msg)
        : Error(msg + " near z = (" + std::to_string(where.real()) + ", " +
                std::to_string(where.imag()) + ")"),
          where_(where) {}

    std::complex<double> where() const { return where_; }

private:
    std::complex<double> where_;
};

/// Evaluation or integration got too close to a pole of the potential.
class PoleProximityError : public PointedError {
public:
    using PointedError::PointedError;
};

/// psi or psi-tilde passed through zero; the logarithmic coordinate breaks down.
class ZeroCrossingError : public PointedError {
public:
    using PointedError::PointedError;
};

class StepUnderflowError : public PointedError {
public:
    using PointedError::PointedError;
};

class MaxStepsError : public Error {
public:
    using Error::Error;
};

/// Bad argument: point outside the strip, parameter out of range, and so on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Quadrature or geodesic search failed to converge.
class SearchError : public Error {
public:
    using Error::Error;
};

}  // namespace liouville
