#pragma once

#include <stdexcept>
#include <string>

namespace rfp {

/// Invalid configuration: shapes that do not compose, missing classes, bad options.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data that violates an operation's contract (labels out of range, zero windows).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// API misuse, e.g. backward() without a recorded forward pass.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training diverged (non-finite loss or gradient).
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rfp
