#pragma once

#include <stdexcept>
#include <string>

namespace topicbench {

/// Base class for every error raised by the library. The CLI reports
/// `what()` on a single diagnostic line tagged with the failing stage.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or missing input data (files, columns, records).
class InputError : public Error {
public:
    using Error::Error;
};

/// A configuration value outside its documented range.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Failure talking to an external embedding service.
class ServiceError : public Error {
public:
    using Error::Error;
};

} // namespace topicbench
