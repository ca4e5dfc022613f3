#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace freshcost {

// Bad argument to an operation: index out of range, malformed vector, n = 0.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation undefined for the input (accuracy of an empty matrix, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Input data inconsistent with the configured classes or schema.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
        : std::runtime_error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct Violation {
    std::string path;     // e.g. "purchase_prob[2][1]", "actions[1].price"
    std::string message;

    bool operator==(const Violation&) const = default;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Violation> violations);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

}  // namespace freshcost
