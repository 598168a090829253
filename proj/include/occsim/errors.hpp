#pragma once

#include <stdexcept>
#include <string>

namespace occsim {

// Invalid configuration or parameters (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed, missing or insufficient input data (CLI exit code 3).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// The two rate anchors cannot both be met under the current geometry (CLI exit code 4).
class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace occsim
