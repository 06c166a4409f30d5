#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace everwill {

/// Malformed input that is not an axiom/law violation (wrong shape, NaN, bad JSON).
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A state that breaks the invariants of its model.
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A will strategy returned a force function the engine cannot accept.
class StrategyViolation : public std::runtime_error {
public:
    StrategyViolation(std::string what, std::optional<std::size_t> person,
                      std::optional<std::size_t> carrier = std::nullopt)
        : std::runtime_error(std::move(what)), person_(person), carrier_(carrier) {}

    std::optional<std::size_t> person() const noexcept { return person_; }
    std::optional<std::size_t> carrier() const noexcept { return carrier_; }

private:
    std::optional<std::size_t> person_;
    std::optional<std::size_t> carrier_;
};

/// Error raised while running a history; carries the failing step index.
class StepError : public std::runtime_error {
public:
    StepError(std::size_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// History handed to the reciprocity audit is not a chain of successors.
class AuditInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace everwill
