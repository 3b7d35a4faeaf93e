#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical or numerical parameter is outside its admissible range.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Two matrices or grids that must agree do not.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// Input is structurally fine but carries no usable signal (all-zero spectra and similar).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Input contains non-finite values or otherwise violates a data contract.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Malformed tabular input; `row` is the 1-based line number (0 when not tied to a line).
class ParseError : public InvalidInput {
public:
    ParseError(std::size_t row, const std::string& what)
        : InvalidInput(row > 0 ? "line " + std::to_string(row) + ": " + what : what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Scenario/config document fails schema validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-fatal conditions collected while computing.
struct Diagnostics {
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
    bool empty() const { return warnings.empty(); }
};

inline void warn(Diagnostics* diag, std::string message) {
    if (diag != nullptr) diag->warn(std::move(message));
}

}  // namespace spdc
