#ifndef QICAP_ERRORS_HPP
#define QICAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qicap {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed arguments: non-finite inputs, bad masks, wrong-axis traces.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Model-domain violations, e.g. the reservoir arcsin argument leaving [-1, 1].
class DomainError : public Error {
public:
    using Error::Error;
};

// File and parse failures; message carries path and, where known, line/row.
class IoError : public Error {
public:
    using Error::Error;
};

// Analysis preconditions not met (too few periods, too few extrema, ...).
class InsufficientData : public Error {
public:
    using Error::Error;
};

// Working-precision overflow/underflow in special-function evaluation.
class NumericRangeError : public Error {
public:
    using Error::Error;
};

} // namespace qicap

#endif
