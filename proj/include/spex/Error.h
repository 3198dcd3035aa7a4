#pragma once

#include <stdexcept>
#include <string>

namespace spex {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::string const & what, std::size_t position = npos)
        : Error(position == npos ? what : what + " at position " + std::to_string(position)), pos{position} {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t position() const { return pos; }

private:
    std::size_t pos;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class UnknownNameError : public Error {
public:
    using Error::Error;
};

// Raised when a solver budget is exhausted; never conflated with SAT/UNSAT.
class TimeoutError : public Error {
public:
    using Error::Error;
};

// Raised when an interpolation query turns out to be satisfiable.
class SatError : public Error {
public:
    using Error::Error;
};

} // namespace spex
