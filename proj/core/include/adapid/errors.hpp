#ifndef ADAPID_ERRORS_HPP
#define ADAPID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adapid {

/// Violated precondition or invariant (bad argument dimensions, invalid
/// parameter ranges, malformed specs).
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid or inconsistent configuration (files parse but describe an
/// unusable experiment).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / parse failures while reading or writing artifacts.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside a solver (lost positive-definiteness, etc.).
/// Plain non-convergence is reported through diagnostics, not thrown.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace adapid

#endif
