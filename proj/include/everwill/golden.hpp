#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "everwill/battle.hpp"
#include "everwill/rng.hpp"
#include "everwill/society.hpp"

namespace everwill {

/// An indivisible token of will with intensity mu > 0 and maximum idle period theta >= 1.
struct ForceCarrier {
    CarrierId id;
    double intensity = 1.0;
    std::size_t max_idle = 1;

    friend bool operator==(const ForceCarrier&, const ForceCarrier&) = default;
};

/// Carriers indexed by id; roster[c].id == c.
using CarrierRoster = std::vector<ForceCarrier>;

/// Throws std::invalid_argument if ids are not dense or mu/theta are out of range.
void check_roster(const CarrierRoster& roster);

nlohmann::json roster_to_json(const CarrierRoster& roster);
CarrierRoster roster_from_json(const nlohmann::json& doc);

/// A cell (x, a, y) of P x E x P.
struct Location {
    PersonId from;
    GoodId good;
    PersonId to;

    /// (y, a, x): where an exercised carrier ends up.
    constexpr Location transposed() const { return {to, good, from}; }
    friend constexpr auto operator<=>(const Location&, const Location&) = default;
};

/// Golden power function stored as one location per carrier. The
/// set-valued view pi(x, a, y) is available through carriers_at().
class GoldenPowerPartition {
public:
    GoldenPowerPartition() = default;
    explicit GoldenPowerPartition(std::vector<Location> locations) : locations_(std::move(locations)) {}

    std::size_t carrier_count() const noexcept { return locations_.size(); }
    const Location& operator[](CarrierId c) const { return locations_.at(c.value); }
    Location& operator[](CarrierId c) { return locations_.at(c.value); }
    const std::vector<Location>& locations() const noexcept { return locations_; }

    /// pi(x, a, y) in ascending carrier order.
    std::vector<CarrierId> carriers_at(const Location& cell) const;

    friend bool operator==(const GoldenPowerPartition&, const GoldenPowerPartition&) = default;

private:
    std::vector<Location> locations_;
};

/// tau: carrier -> consecutive unexercised steps.
using IdleTable = std::vector<std::size_t>;

/// Golden force function: for each carrier, the cell where it is exercised,
/// or nothing if it stays idle this step.
class GoldenForceSelection {
public:
    GoldenForceSelection() = default;
    explicit GoldenForceSelection(std::size_t carriers) : exercised_at_(carriers) {}

    std::size_t carrier_count() const noexcept { return exercised_at_.size(); }
    bool exercised(CarrierId c) const { return exercised_at_.at(c.value).has_value(); }
    const std::optional<Location>& where(CarrierId c) const { return exercised_at_.at(c.value); }
    void exercise(CarrierId c, const Location& at) { exercised_at_.at(c.value) = at; }
    void clear(CarrierId c) { exercised_at_.at(c.value).reset(); }

    /// phi(x, a, y) in ascending carrier order.
    std::vector<CarrierId> carriers_at(const Location& cell) const;
    std::vector<CarrierId> exercised_carriers() const;

    friend bool operator==(const GoldenForceSelection&, const GoldenForceSelection&) = default;

private:
    std::vector<std::optional<Location>> exercised_at_;
};

struct GoldenState {
    SocialAssignment assignment;
    GoldenPowerPartition partition;
    IdleTable idle;
    GoldenForceSelection selection;

    friend bool operator==(const GoldenState&, const GoldenState&) = default;
};

enum class GoldenDefect {
    Shape,                 ///< table sizes disagree with the roster or society
    PartitionCover,        ///< a carrier is missing from the union of cells
    PartitionDisjoint,     ///< a carrier sits in two cells
    IdleBound,             ///< tau(c) > theta(c)
    ExercisedOffLocation,  ///< c in phi(x,a,y) but not in pi(x,a,y)
    MandatoryOmitted,      ///< tau(c) = theta(c) yet c is not exercised
};

std::string to_string(GoldenDefect defect);

struct GoldenIssue {
    GoldenDefect defect;
    std::optional<CarrierId> carrier;
    std::string detail;
};

/// Every state-level defect, without throwing.
std::vector<GoldenIssue> golden_state_issues(const Society& society, const CarrierRoster& roster,
                                             const GoldenState& state);

/// Partition checks only: ranges, cover of C and pairwise disjointness of cells,
/// evaluated on the set-valued view.
std::vector<GoldenIssue> partition_issues(const Society& society, const CarrierRoster& roster,
                                          const GoldenPowerPartition& partition);

/// One non-empty cell of the set-valued view.
struct PartitionCell {
    Location cell;
    std::vector<CarrierId> carriers;
};

/// Non-empty cells in ascending (x, a, y) order.
std::vector<PartitionCell> partition_cells(const GoldenPowerPartition& partition);

struct ParsedPartition {
    GoldenPowerPartition partition;  ///< first cell wins for duplicated carriers
    std::vector<GoldenIssue> issues;
};

/// Rebuilds the location table from set-valued cells, reporting carriers that
/// are covered by no cell or by more than one.
ParsedPartition partition_from_cells(const Society& society, std::size_t carrier_count,
                                     std::span<const PartitionCell> cells);

/// Throws StateError on the first issue.
void check_golden_state(const Society& society, const CarrierRoster& roster, const GoldenState& state);

struct GoldenContext {
    const Society& society;
    const CarrierRoster& roster;
    const SocialAssignment& assignment;
    const GoldenPowerPartition& partition;
    const IdleTable& idle;
    std::size_t step;
    Rng& rng;

    bool mandatory(CarrierId c) const { return idle[c.value] == roster[c.value].max_idle; }
};

class GoldenStrategy {
public:
    virtual ~GoldenStrategy() = default;
    virtual std::string name() const = 0;
    virtual GoldenForceSelection propose(const GoldenContext& ctx) = 0;
};

/// Throws StrategyViolation if a carrier is exercised away from its location
/// or a carrier with tau = theta is left idle.
void check_golden_selection(const CarrierRoster& roster, const GoldenPowerPartition& partition,
                            const IdleTable& idle, const GoldenForceSelection& selection);

/// psi(x,a,y) = sum of mu(c) over c in phi(x,a,y), times rho(x,alpha(a)) rho(alpha(a),y).
double golden_effectiveness(const Society& society, const CarrierRoster& roster, const GoldenState& state,
                            PersonId x, GoodId a, PersonId y);

struct ExtendedTables {
    std::vector<CarrierId> power;  ///< pi*(X, a, Y)
    std::vector<CarrierId> force;  ///< phi*(X, a, Y)
    double effectiveness = 0.0;    ///< psi*(X, a, Y)
};

/// Unions and sums over the rectangle X x {a} x Y.
ExtendedTables extended_tables(const Society& society, const CarrierRoster& roster, const GoldenState& state,
                               std::span<const PersonId> from, GoodId a, std::span<const PersonId> to);

/// psi*(P, a, {w}) / psi*(P, a, P), or a point mass on the owner when psi*(P, a, P) = 0.
std::vector<double> golden_win_distribution(const Society& society, const CarrierRoster& roster,
                                            const GoldenState& state, GoodId a);

/// The part of the successor fixed by the laws: alpha', pi', tau'.
struct GoldenLawResult {
    SocialAssignment assignment;
    GoldenPowerPartition partition;
    IdleTable idle;
};

/// Exercised carriers move from (x,a,y) to (y,a,x) with tau reset to 0;
/// idle ones stay put and age by one. Intensities play no part here.
GoldenLawResult golden_successor_laws(const GoldenState& state, std::span<const PersonId> winners);

struct GoldenStep {
    GoldenState state;
    BattleRecord record;
};

GoldenStep golden_step(const Society& society, const CarrierRoster& roster, const GoldenState& state,
                       GoldenStrategy& strategy, RunStreams& streams, std::size_t step = 1);

nlohmann::json golden_state_to_json(const GoldenState& state);

/// Reads the [x, a, y, [carriers]] cells of a snapshot without judging them.
std::vector<PartitionCell> partition_cells_from_json(const nlohmann::json& doc);

/// Strict parse; a partition that is not a cover or not disjoint throws StructuralError.
GoldenState golden_state_from_json(const nlohmann::json& doc);

}  // namespace everwill
