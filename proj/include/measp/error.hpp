#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace measp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parse failure located at a 1-based line and column (column 0 when unknown).
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t line, std::size_t column = 0)
        : Error(format(message, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, std::size_t line, std::size_t column) {
        std::string where = "line " + std::to_string(line);
        if (column > 0) where += ", column " + std::to_string(column);
        return where + ": " + message;
    }

    std::size_t line_;
    std::size_t column_;
};

// Model file problems: corrupt content, manifest mismatch.
class ModelError : public Error {
public:
    using Error::Error;
};

class VersionError : public ModelError {
public:
    using ModelError::ModelError;
};

// Invalid arguments or environment (bad k, missing limit support, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace measp
