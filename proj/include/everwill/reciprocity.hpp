#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "everwill/golden.hpp"

namespace everwill {

/// Why `next` cannot follow `prev` under the golden laws, or nothing if it can.
/// Checks both states, relocation of exercised carriers, the idle law, and that
/// every new owner had positive winning probability.
std::optional<std::string> golden_successor_mismatch(const Society& society, const CarrierRoster& roster,
                                                     const GoldenState& prev, const GoldenState& next);

struct ReciprocityViolation {
    CarrierId carrier;
    std::size_t exercised_at;  ///< t1
    Location cell;             ///< where it was exercised; the mirror is cell.transposed()
    std::size_t deadline;      ///< t1 + 1 + theta(c)
    std::optional<std::size_t> reciprocated_at;  ///< late reciprocation inside the history, if any
};

struct CarrierLatency {
    std::map<std::size_t, std::size_t> histogram;  ///< latency t2 - t1 -> count
    std::size_t pending = 0;
};

struct ReciprocityReport {
    std::size_t horizon = 0;
    std::size_t events = 0;
    std::size_t resolved = 0;
    std::size_t pending = 0;
    std::vector<CarrierLatency> per_carrier;
    std::vector<ReciprocityViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
    nlohmann::json to_json() const;
};

/// For every exercise of c at (x, a, y) at t1 <= horizon, finds the earliest
/// t2 > t1 with c exercised at (y, a, x) and requires t2 <= t1 + 1 + theta(c).
/// Events whose deadline lies past the horizon and that are still open are
/// counted as pending. Throws AuditInputError if adjacent states are not
/// successors or the horizon exceeds the history.
ReciprocityReport reciprocity_audit(const Society& society, const CarrierRoster& roster,
                                    std::span<const GoldenState> history,
                                    std::optional<std::size_t> horizon = std::nullopt);

/// A rectangle X x {a} x Y for the set-extended reciprocity check.
struct Rectangle {
    std::vector<PersonId> from;
    GoodId good;
    std::vector<PersonId> to;
};

struct SetReciprocityReport {
    std::size_t events = 0;
    std::size_t pending = 0;
    std::size_t violations = 0;
    bool ok() const noexcept { return violations == 0; }
};

/// For each rectangle and each c in phi*_t1(X, a, Y), requires some
/// t1 < t2 <= t1 + 1 + theta(c) with c in phi*_t2(Y, a, X).
SetReciprocityReport set_reciprocity_audit(const Society& society, const CarrierRoster& roster,
                                           std::span<const GoldenState> history,
                                           std::span<const Rectangle> rectangles);

}  // namespace everwill
