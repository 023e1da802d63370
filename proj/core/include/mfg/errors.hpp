#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two objects live on different grids.
class IncompatibleGrid : public Error {
public:
    using Error::Error;
};

/// Time step too large for the drift magnitude.
class CflViolation : public Error {
public:
    CflViolation(const std::string& what, double requiredDt)
        : Error(what), requiredDt_(requiredDt) {}
    [[nodiscard]] double requiredDt() const noexcept { return requiredDt_; }

private:
    double requiredDt_;
};

/// Diffusion coefficient not bounded below by a positive constant.
class NonElliptic : public Error {
public:
    using Error::Error;
};

/// A fixed-point iteration exhausted its iteration budget.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::string solve)
        : Error(what), solve_(std::move(solve)) {}
    [[nodiscard]] const std::string& solve() const noexcept { return solve_; }

private:
    std::string solve_;
};

/// The configured evaluation budget of a recursive scheme was exhausted.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// A measure functional lacks a derivative required by a linearized solve.
class MissingDerivative : public Error {
public:
    using Error::Error;
};

/// Invalid scenario configuration.
class ScenarioError : public Error {
public:
    using Error::Error;
};

/// Argument outside the supported range of an operation.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace mfg
