#pragma once

#include <stdexcept>
#include <string>

namespace dsqe {

// Error taxonomy mirrored by the CLI exit codes: configuration and argument
// problems exit with 2, capacity guards with 3, eigensolver failures with 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-facing input: malformed config files, invalid model parameters.
struct ConfigError : Error {
    using Error::Error;
};

// A function argument violated its contract (invalid dimension, filling, ...).
struct InvalidArgument : ConfigError {
    using ConfigError::ConfigError;
};

// Selection rule produced an empty subspace basis.
struct EmptyBasisError : ConfigError {
    using ConfigError::ConfigError;
};

// Requested problem size exceeds a hard resource guard.
struct CapacityError : Error {
    using Error::Error;
};

// Iterative eigensolver failed to converge or produced a bad residual.
struct SolverError : Error {
    using Error::Error;
};

}  // namespace dsqe
