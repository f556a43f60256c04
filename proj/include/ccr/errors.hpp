#pragma once

#include <stdexcept>
#include <string>

namespace ccr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An operation could not be applied to the state it met.
class ApplyError : public Error {
public:
    using Error::Error;
};

// compose() was handed two patches that share an operation uid.
class CompositionError : public Error {
public:
    using Error::Error;
};

// A pair of operations that effectful generation can never produce from one
// state, or two copies of one operation that disagree on their body.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

// Operation, state or message tagged with the wrong replica kind.
class KindError : public Error {
public:
    using Error::Error;
};

// A user request that cannot be turned into an operation.
class IntentError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

// The site stopped processing after a failed integration.
class FaultError : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};

// A REPL line that does not parse. `column` is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t column)
        : Error("column " + std::to_string(column) + ": " + what), column_(column)
    {
    }
    std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

}  // namespace ccr
