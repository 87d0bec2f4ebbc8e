#pragma once

#include <stdexcept>
#include <string>

namespace chimera {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
    ParseError(const std::string& msg, long line_no)
        : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    long line;
};

// Data violates an invariant (negative weight, asymmetric matrix, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Matrix/grid dimensions do not match expectations.
struct ShapeError : Error {
    using Error::Error;
};

// Bad argument to an operation.
struct ArgumentError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// A trajectory left the divergence bound.  `when` is the simulation time for
// continuous systems and the step index for maps.
struct DivergenceError : Error {
    DivergenceError(const std::string& msg, double when_)
        : Error(msg + " at t=" + std::to_string(when_)), when(when_) {}
    double when;
};

// A signal with zero norm cannot be normalized.
struct DegenerateSignalError : Error {
    using Error::Error;
};

// Box-count dimension of an empty set is undefined.
struct EmptyBoundaryError : Error {
    using Error::Error;
};

// Too few usable scales inside the fit window.
struct InsufficientScalesError : Error {
    using Error::Error;
};

// Sweep was cancelled; checkpoint (if enabled) is left resumable.
struct SweepInterrupted : Error {
    using Error::Error;
};

// Invalid pipeline configuration; message lists one diagnostic per line, each
// prefixed with the offending document path. Maps to exit code 2 in the CLI.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace chimera
