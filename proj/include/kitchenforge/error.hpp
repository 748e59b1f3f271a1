#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kitchenforge {

/// Malformed input text. Carries the 1-based line (scenario documents) or the
/// byte offset (metric records) where the problem was detected.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string const& message, std::size_t line, std::size_t offset)
        : std::runtime_error(message), line_(line), offset_(offset) {}

    static ParseError at_line(std::size_t line, std::string const& message) {
        return ParseError("line " + std::to_string(line) + ": " + message, line, 0);
    }
    static ParseError at_offset(std::size_t offset, std::string const& message) {
        return ParseError("offset " + std::to_string(offset) + ": " + message, 0, offset);
    }

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t line_;
    std::size_t offset_;
};

/// Semantically invalid scenario: dangling references, zone/pot mismatch.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An observable record whose name matches none of the known patterns.
class UnmappedObservable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(unsigned long long combinations)
        : std::runtime_error("enumeration budget exceeded: " + std::to_string(combinations) +
                             " combinations"),
          combinations_(combinations) {}

    [[nodiscard]] unsigned long long combinations() const noexcept { return combinations_; }

private:
    unsigned long long combinations_;
};

class BrokerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace kitchenforge
