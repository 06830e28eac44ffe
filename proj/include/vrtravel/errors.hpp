#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vrtravel {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Query outside the world grid.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Operation not permitted in the current technique state. The state is left unchanged.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid or infeasible configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed serialized record; `index` is the zero-based record position.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t index, const std::string& what)
        : std::runtime_error("record " + std::to_string(index) + ": " + what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Input script violation (out-of-order or mis-ticked events).
class ScriptError : public std::runtime_error {
public:
    ScriptError(std::uint64_t tick, const std::string& what)
        : std::runtime_error("tick " + std::to_string(tick) + ": " + what), tick_(tick) {}
    std::uint64_t tick() const noexcept { return tick_; }

private:
    std::uint64_t tick_;
};

}  // namespace vrtravel
