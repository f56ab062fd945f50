#pragma once

#include <stdexcept>
#include <string>

namespace isnet {

/// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension or shape mismatch between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (widths, rates, hyperparameters).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Problems with external data: files, schemas, label ranges.
class DataError : public Error {
public:
    using Error::Error;
};

class BadMagicError : public DataError {
public:
    using DataError::DataError;
};

class TruncatedFileError : public DataError {
public:
    using DataError::DataError;
};

class CountMismatchError : public DataError {
public:
    using DataError::DataError;
};

class VersionMismatchError : public DataError {
public:
    using DataError::DataError;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

/// Non-finite values where finite ones are required (NaN/Inf abort).
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace isnet
