#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twr {

/// A rate, capacity, gain or power outside its valid domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input with no meaningful answer, e.g. a backlog ray from (0,0).
class DegenerateInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A loop hit its configured slot or horizon cap without terminating.
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration. line() is 0 when the error is not tied to a file line.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace twr
