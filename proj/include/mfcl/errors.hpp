#pragma once

#include <stdexcept>
#include <string>

namespace mfcl {

// Base of every error the library throws. The CLI maps ConfigError (and its
// children) to exit status 1 and everything else to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class IngestionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class ImputationError : public Error {
public:
    using Error::Error;
};

class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

class EmptyMaskError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace mfcl
