#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "everwill/history.hpp"
#include "everwill/reciprocity.hpp"

namespace everwill {

/// Conservation tolerance for total power, per step and against sigma_0.
inline constexpr double kConservationTolerance = 1e-9;
/// Tolerance for comparing logged lottery distributions and pairwise exchanges.
inline constexpr double kLogTolerance = 1e-12;

struct InvariantViolation {
    std::string check;
    std::size_t step;  ///< index of the offending state sigma_t
    std::string detail;
};

struct InvariantReport {
    ModelKind model = ModelKind::Primitive;
    std::size_t states = 0;
    std::vector<std::string> checks;  ///< names of the checks that ran
    std::vector<InvariantViolation> violations;
    std::optional<ReciprocityReport> reciprocity;
    std::optional<SetReciprocityReport> set_reciprocity;
    std::vector<std::string> notes;

    bool ok() const noexcept;
    /// Earliest step with a violation of `check` (any check if empty).
    std::optional<std::size_t> first_violation(const std::string& check = {}) const;
    nlohmann::json to_json() const;
};

/// Runs every invariant of the log's model over each logged state and each
/// adjacent pair:
///   all      lottery (support + logged distribution), assignment, replay
///   primitive/good  state, conservation; good also antisymmetry, diagonal
///   golden   partition, idle-bound, selection, mandatory, carrier-conservation,
///            relocation, idle-law, degenerate-lottery, reciprocity, set-reciprocity
/// Throws SnapshotGapError when a step lacks a snapshot.
InvariantReport check_invariants(const HistoryLog& log);

struct ReplayReport {
    std::size_t steps_checked = 0;
    std::vector<std::size_t> mismatches;  ///< steps whose snapshot the laws do not reproduce
    bool ok() const noexcept { return mismatches.empty(); }
};

/// Re-applies the deterministic laws to each logged winner set, takes the
/// logged force function as the free choice, and compares the resulting state
/// with the logged snapshot byte for byte.
ReplayReport replay_history(const HistoryLog& log);

}  // namespace everwill
