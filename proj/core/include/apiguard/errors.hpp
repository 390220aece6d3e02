#pragma once

#include <stdexcept>
#include <string>

namespace apiguard {

/// Base class for all domain errors. The CLI maps these to exit code 1
/// and prints name() + what() instead of a stack trace.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string name, const std::string& msg)
        : std::runtime_error(msg), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class SyntaxError : public DomainError {
public:
    SyntaxError(int line, int column, const std::string& expected)
        : DomainError("SyntaxError",
                      "line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": expected " + expected),
          line(line), column(column), expected(expected) {}
    int line;
    int column;
    std::string expected;
};

class UnboundVariable : public DomainError {
public:
    UnboundVariable(std::string varName, int line)
        : DomainError("UnboundVariable",
                      "use of unbound variable '" + varName + "' at line " + std::to_string(line)),
          varName(std::move(varName)), line(line) {}
    std::string varName;
    int line;
};

class FormatError : public DomainError {
public:
    FormatError(std::size_t byteOffset, const std::string& msg)
        : DomainError("FormatError", "byte " + std::to_string(byteOffset) + ": " + msg),
          byteOffset(byteOffset) {}
    std::size_t byteOffset;
};

class InvalidGroum : public DomainError {
public:
    explicit InvalidGroum(const std::string& msg) : DomainError("InvalidGroum", msg) {}
};

class EmptySignature : public DomainError {
public:
    explicit EmptySignature(const std::string& method)
        : DomainError("EmptySignature", "no API node survives pruning in method '" + method + "'") {}
};

class MixedVariant : public DomainError {
public:
    MixedVariant() : DomainError("MixedVariant", "cannot compare a simple groum with a complex one") {}
};

class UnknownMethod : public DomainError {
public:
    explicit UnknownMethod(const std::string& method)
        : DomainError("UnknownMethod", "API method '" + method + "' is not in the co-usage index") {}
};

class Inapplicable : public DomainError {
public:
    explicit Inapplicable(const std::string& kind)
        : DomainError("Inapplicable", "operator '" + kind + "' is not applicable to this groum"),
          kind(kind) {}
    std::string kind;
};

class EmptySelf : public DomainError {
public:
    EmptySelf() : DomainError("EmptySelf", "self corpus is empty") {}
};

class SingletonSet : public DomainError {
public:
    SingletonSet() : DomainError("SingletonSet", "detector distance needs a set of at least 2") {}
};

class TooFewCases : public DomainError {
public:
    explicit TooFewCases(const std::string& msg) : DomainError("TooFewCases", msg) {}
};

class LeakError : public DomainError {
public:
    explicit LeakError(const std::string& method)
        : DomainError("LeakError", "test signature '" + method + "' reached detector generation") {}
};

class ConfigError : public DomainError {
public:
    explicit ConfigError(const std::string& msg) : DomainError("ConfigError", msg) {}
};

class IoError : public DomainError {
public:
    explicit IoError(const std::string& msg) : DomainError("IoError", msg) {}
};

} // namespace apiguard
