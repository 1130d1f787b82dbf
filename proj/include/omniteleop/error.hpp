#pragma once

#include <stdexcept>
#include <string>

namespace omniteleop {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateDirection : public Error {
public:
    DegenerateDirection() : Error("degenerate direction: vector norm below epsilon") {}
};

class NonPositiveDt : public Error {
public:
    explicit NonPositiveDt(double dt) : Error("time step must be positive, got " + std::to_string(dt)) {}
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class MalformedFrame : public Error {
public:
    using Error::Error;
};

class VersionMismatch : public Error {
public:
    explicit VersionMismatch(int got)
        : Error("unsupported schema_version " + std::to_string(got)) {}
};

class EmptyLog : public Error {
public:
    EmptyLog() : Error("metrics need at least one log record") {}
};

class BindError : public Error {
public:
    using Error::Error;
};

} // namespace omniteleop
