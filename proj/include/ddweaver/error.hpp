#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddweaver {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed circuit, device or policy text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A value violates a documented invariant (e.g. T2 > 2*T1).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// A two-qubit gate was mapped onto a pair that is not a device edge.
class UnroutedGateError : public Error {
public:
    using Error::Error;
};

/// The window cannot host a DD sequence (duration < 2 * pulse).
class WindowTooShort : public Error {
public:
    using Error::Error;
};

/// The strategy does not apply to the window's segment shape.
class InapplicableStrategy : public Error {
public:
    using Error::Error;
};

class SimulationError : public Error {
public:
    using Error::Error;
};

} // namespace ddweaver
