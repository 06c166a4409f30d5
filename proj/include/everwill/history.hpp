#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "everwill/config.hpp"
#include "everwill/golden.hpp"
#include "everwill/good.hpp"
#include "everwill/metrics.hpp"
#include "everwill/primitive.hpp"

namespace everwill {

inline constexpr const char* kEngineVersion = "0.1.0";

using AnyState = std::variant<PrimitiveState, GoodState, GoldenState>;

/// Society, carriers and sigma_0 built from a config.
struct PreparedRun {
    RunConfig config;
    Society society;
    CarrierRoster roster;  ///< empty unless golden
    AnyState initial;
};

/// Builds the world and the initial state. Explicit tables from the config are
/// validated; missing ones are generated (unit power, round-robin owners,
/// strategy-bootstrapped force, seeded carrier placement). Throws ConfigError.
PreparedRun prepare_run(const RunConfig& config);

/// A history as JSONL records. Record kinds: one "header" (config echo,
/// versions, seed, society, carriers, sigma_0), one "step" per transition with
/// t = index of the state it produces (1..N), one "footer" with metrics.
struct HistoryLog {
    nlohmann::json header;
    std::vector<nlohmann::json> steps;
    std::optional<nlohmann::json> footer;

    void write(std::ostream& out) const;
    std::string to_string() const;
};

/// Parses JSONL. Throws StructuralError on malformed records, a missing
/// header, or step indices that are not contiguous.
HistoryLog read_history(std::istream& in);
HistoryLog read_history_file(const std::string& path);

struct RunResult {
    HistoryLog log;
    MetricsReport metrics;
};

/// Runs `steps` successor transitions (0 gives the header-only prefix).
/// Strategy and state errors are rethrown as StepError with the failing step.
RunResult run_history(const PreparedRun& prepared, std::size_t steps);
RunResult run_history(const RunConfig& config);

/// Full typed history decoded from a log with a snapshot at every step.
struct DecodedHistory {
    ModelKind model;
    Society society;
    CarrierRoster roster;
    std::vector<AnyState> states;        ///< sigma_0..sigma_N
    std::vector<BattleRecord> battles;   ///< battles[t-1] produced sigma_t
};

class SnapshotGapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws SnapshotGapError if some step lacks a snapshot.
DecodedHistory decode_history(const HistoryLog& log);

}  // namespace everwill
