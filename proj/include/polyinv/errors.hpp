#pragma once

#include <stdexcept>
#include <string>

namespace polyinv {

// Base class for all library errors. Subclasses distinguish the failure
// modes that callers are expected to branch on (exit codes, "undecided"
// verdicts, skip entries in reports).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input / construction errors (CLI exit code 2).
class InputError : public Error {
public:
    using Error::Error;
};

class ParamsMismatch : public InputError {
public:
    ParamsMismatch() : InputError("operands belong to different model rings") {}
};

class SchemaError : public InputError {
public:
    SchemaError(const std::string& path, const std::string& reason)
        : InputError("schema error at " + path + ": " + reason), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class ShorthandError : public InputError {
public:
    using InputError::InputError;
};

class ValidationError : public InputError {
public:
    using InputError::InputError;
};

class LengthMismatch : public InputError {
public:
    LengthMismatch() : InputError("polygons have different lengths") {}
};

class NonDivisibleHeight : public InputError {
public:
    using InputError::InputError;
};

class SlopeOutOfRange : public InputError {
public:
    using InputError::InputError;
};

class MissingEndpoint : public InputError {
public:
    using InputError::InputError;
};

class TooLarge : public InputError {
public:
    using InputError::InputError;
};

class RTauOutOfRange : public InputError {
public:
    using InputError::InputError;
};

class EigenvalueCollision : public InputError {
public:
    using InputError::InputError;
};

class EmptyTower : public InputError {
public:
    EmptyTower() : InputError("hn_tower has no levels") {}
};

class OutOfDomain : public InputError {
public:
    using InputError::InputError;
};

class EndpointMismatch : public InputError {
public:
    using InputError::InputError;
};

// Precision failures (CLI exit code 3).
class PrecisionExhausted : public Error {
public:
    using Error::Error;
};

class DivideByIndistinguishableZero : public PrecisionExhausted {
public:
    DivideByIndistinguishableZero()
        : PrecisionExhausted("divisor is indistinguishable from zero at current precision") {}
};

// Structural failures of the input datum (CLI exit code 4).
class NotRealizable : public Error {
public:
    using Error::Error;
};

class NotNilpotentAtE : public NotRealizable {
public:
    using NotRealizable::NotRealizable;
};

class NonIntegralBreaks : public NotRealizable {
public:
    using NotRealizable::NotRealizable;
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(int m_max)
        : Error("Newton limit mode did not converge by power m=" + std::to_string(m_max)),
          m_max_(m_max) {}
    int m_max() const { return m_max_; }

private:
    int m_max_;
};

class InternalMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace polyinv
