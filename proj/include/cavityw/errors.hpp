#pragma once

#include <stdexcept>
#include <string>

namespace cavityw {

/// Base class of every error raised by the library. `kind()` is a short
/// machine-readable class name that ends up in CLI manifests.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Invalid configuration: duplicate labels, bad JSON, unknown keys.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

/// Argument outside its mathematical domain (negative rate, r <= 0, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& what) : Error("shape", what) {}
};

struct LookupError : Error {
    explicit LookupError(const std::string& what) : Error("lookup", what) {}
};

/// Operands built over different bases.
struct IncompatibleBasisError : Error {
    explicit IncompatibleBasisError(const std::string& what) : Error("incompatible-basis", what) {}
};

/// A design condition required by an operation does not hold. `condition()`
/// carries the condition id (see ConditionId in device.hpp).
class ConditionViolation : public Error {
public:
    ConditionViolation(std::string condition, const std::string& what)
        : Error("condition-violation", what), condition_(std::move(condition)) {}
    const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

/// Numerical failure inside an integration.
struct NumericError : Error {
    NumericError(std::string kind, const std::string& what) : Error(std::move(kind), what) {}
};

struct StiffnessError : NumericError {
    explicit StiffnessError(const std::string& what) : NumericError("stiffness", what) {}
};

struct ConvergenceError : NumericError {
    explicit ConvergenceError(const std::string& what) : NumericError("convergence", what) {}
};

}  // namespace cavityw
