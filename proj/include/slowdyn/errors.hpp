#pragma once

#include <stdexcept>
#include <string>

namespace slowdyn {

/// Invalid configuration, CLI usage, or input file contents. Carries the
/// 1-based line number of the offending config line when known (0 otherwise).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_ = 0;
};

/// An operation was invoked outside its contract (nonzero-mean source for an
/// inverse Laplacian, mismatched grids, unordered history, ...).
class PreconditionError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values appeared while evaluating tendencies or stepping in time.
/// Carries the simulation time at which the blowup was detected.
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& msg, double t)
        : std::runtime_error(msg + " (t = " + std::to_string(t) + ")"), t_(t) {}

    double time() const noexcept { return t_; }

private:
    double t_;
};

/// Filesystem or stream failure, corrupt headers, truncated binary payloads.
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace slowdyn
