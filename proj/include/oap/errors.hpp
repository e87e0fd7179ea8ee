#ifndef OAP_ERRORS_HPP
#define OAP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oap {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform (apply, dot, solver inputs).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A recurrence produced a NaN or Inf.
class NumericalOverflow : public Error {
public:
    NumericalOverflow(std::size_t step, const std::string& what)
        : Error("numerical overflow at step " + std::to_string(step) + ": " + what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// A starting vector could not be normalized (A'w or the chosen row vanishes).
class DegenerateSeed : public Error {
public:
    using Error::Error;
};

/// Every column of a projection basis was rank-filtered away.
class EmptySubspace : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace oap

#endif  // OAP_ERRORS_HPP
