#pragma once

#include <stdexcept>
#include <string>

namespace divprof {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Input data cannot be processed (malformed records, bad values).
class DataError : public Error {
public:
    using Error::Error;
};

// A metric has no defined value on the given input (e.g. empty token list).
class UndefinedMetric : public DataError {
public:
    using DataError::DataError;
};

// Data is degenerate for the requested computation (e.g. all values equal).
class DegenerateData : public DataError {
public:
    using DataError::DataError;
};

// Malformed serialized input (JSONL line, lexicon row, ...).
class ParseError : public DataError {
public:
    using DataError::DataError;
};

// Filesystem failure; message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

// Remote provider (generation endpoint, embedding service) failure;
// message carries the endpoint.
class ProviderError : public Error {
public:
    using Error::Error;
};

} // namespace divprof
