#pragma once

#include <stdexcept>
#include <string>

namespace phasekit {

// Base of every error raised by the library. The CLI maps the subclasses
// onto its exit-code contract.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument value (nonpositive parameter, negative exponent, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operation was called on an object that violates its precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class UnsupportedConstructError : public ParseError {
public:
    UnsupportedConstructError(const std::string& token, int line, int column)
        : ParseError("unsupported construct '" + token + "'", line, column), token_(token) {}
    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

class UnknownSymbolError : public ParseError {
public:
    UnknownSymbolError(const std::string& name, int line, int column)
        : ParseError("unknown symbol '" + name + "'", line, column), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class ZeroDenominatorError : public Error {
public:
    using Error::Error;
};

/// A free parameter was used without a bound value.
class UnboundParameterError : public Error {
public:
    explicit UnboundParameterError(const std::string& name)
        : Error("parameter '" + name + "' has no value"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Root finder could not separate candidate zeros before its depth cap.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

/// Center-manifold series vanished through the requested order.
class InconclusiveError : public Error {
public:
    InconclusiveError(const std::string& msg, int order) : Error(msg), order_(order) {}
    int order() const noexcept { return order_; }

private:
    int order_;
};

/// Blow-up recursion did not terminate within its depth cap.
class UnresolvedError : public Error {
public:
    using Error::Error;
};

/// Raised when independently computed objects disagree with the tabulated
/// classification. Signals a bug, not bad input.
class InternalInconsistencyError : public Error {
public:
    using Error::Error;
};

class SingularEvaluationError : public Error {
public:
    using Error::Error;
};

class UndefinedPointError : public Error {
public:
    using Error::Error;
};

}  // namespace phasekit
