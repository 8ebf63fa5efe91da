#pragma once

#include <stdexcept>
#include <string>

namespace geobias {

// Base for every error the library raises. The CLI maps these to exit code 1
// (runtime) or 2 (usage/config), so new error types must derive from Error.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A named column or attribute is missing or has the wrong shape.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Malformed input content (bad number, broken JSON, ...). Messages carry the
// offending row/position where known.
class ParseError : public Error {
public:
    using Error::Error;
};

// An operation that requires data received none.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

// A window/region selection matched zero usable cells.
class EmptyWindowError : public Error {
public:
    using Error::Error;
};

// An argument is outside its documented domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Too few samples, records, or valid cells for the requested statistic.
class SampleSizeError : public Error {
public:
    using Error::Error;
};

// Input is degenerate for the requested computation (zero variance,
// constant predictor, zero overall mean, ...).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Invariant violation inside the library itself; always a bug.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace geobias
