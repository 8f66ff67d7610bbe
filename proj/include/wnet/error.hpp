#pragma once

#include <stdexcept>
#include <string>

namespace wnet {

/// Bad configuration or arguments. Surfaces as CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problem with the input data (malformed rows, missing GDP, absent year...).
/// Surfaces as CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough usable values for a statistic (too few points, zero variance).
/// The pipeline downgrades these to log entries instead of aborting.
class DegenerateError : public DataError {
public:
    using DataError::DataError;
};

} // namespace wnet
