#pragma once

#include <stdexcept>
#include <string>

namespace mimo {

// Process exit codes shared by the CLI and the library entry points.
enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_convergence_error = 3,
    exit_io_error = 4,
};

/// Invalid configuration or rejected input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fixed-point solve did not reach its tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mimo
