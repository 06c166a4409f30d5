#include "everwill/golden.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "everwill/errors.hpp"

namespace everwill {

void check_roster(const CarrierRoster& roster) {
    if (roster.empty()) throw std::invalid_argument("carrier roster must be nonempty");
    for (std::size_t c = 0; c < roster.size(); ++c) {
        const auto& carrier = roster[c];
        if (carrier.id.value != c)
            throw std::invalid_argument("carrier ids must be dense: position " + std::to_string(c) +
                                        " holds id " + std::to_string(carrier.id.value));
        if (!std::isfinite(carrier.intensity) || carrier.intensity <= 0.0)
            throw std::invalid_argument("carrier " + std::to_string(c) + " needs intensity > 0");
        if (carrier.max_idle < 1)
            throw std::invalid_argument("carrier " + std::to_string(c) + " needs max idle period >= 1");
    }
}

nlohmann::json roster_to_json(const CarrierRoster& roster) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : roster) out.push_back({{"id", c.id.value}, {"mu", c.intensity}, {"theta", c.max_idle}});
    return out;
}

CarrierRoster roster_from_json(const nlohmann::json& doc) {
    CarrierRoster roster;
    try {
        for (const auto& entry : doc) {
            const auto theta = entry.at("theta").get<long long>();
            if (theta < 1) throw std::invalid_argument("carrier theta must be >= 1");
            roster.push_back({CarrierId(entry.at("id").get<std::size_t>()), entry.at("mu").get<double>(),
                              static_cast<std::size_t>(theta)});
        }
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("malformed carrier roster: ") + e.what());
    }
    check_roster(roster);
    return roster;
}

std::vector<CarrierId> GoldenPowerPartition::carriers_at(const Location& cell) const {
    std::vector<CarrierId> out;
    for (std::size_t c = 0; c < locations_.size(); ++c)
        if (locations_[c] == cell) out.emplace_back(c);
    return out;
}

std::vector<CarrierId> GoldenForceSelection::carriers_at(const Location& cell) const {
    std::vector<CarrierId> out;
    for (std::size_t c = 0; c < exercised_at_.size(); ++c)
        if (exercised_at_[c] && *exercised_at_[c] == cell) out.emplace_back(c);
    return out;
}

std::vector<CarrierId> GoldenForceSelection::exercised_carriers() const {
    std::vector<CarrierId> out;
    for (std::size_t c = 0; c < exercised_at_.size(); ++c)
        if (exercised_at_[c]) out.emplace_back(c);
    return out;
}

std::string to_string(GoldenDefect defect) {
    switch (defect) {
        case GoldenDefect::Shape: return "shape";
        case GoldenDefect::PartitionCover: return "partition-cover";
        case GoldenDefect::PartitionDisjoint: return "partition-disjoint";
        case GoldenDefect::IdleBound: return "idle-bound";
        case GoldenDefect::ExercisedOffLocation: return "exercised-off-location";
        case GoldenDefect::MandatoryOmitted: return "mandatory-omitted";
    }
    return "unknown";
}

namespace {

bool in_range(const Society& society, const Location& cell) {
    return cell.from.value < society.person_count() && cell.to.value < society.person_count() &&
           cell.good.value < society.good_count();
}

std::string describe(const Location& cell) {
    return "(" + std::to_string(cell.from.value) + ", " + std::to_string(cell.good.value) + ", " +
           std::to_string(cell.to.value) + ")";
}

}  // namespace

std::vector<PartitionCell> partition_cells(const GoldenPowerPartition& partition) {
    std::map<Location, std::vector<CarrierId>> cells;
    for (std::size_t c = 0; c < partition.carrier_count(); ++c)
        cells[partition[CarrierId(c)]].emplace_back(c);
    std::vector<PartitionCell> out;
    for (auto& [cell, carriers] : cells) out.push_back({cell, std::move(carriers)});
    return out;
}

ParsedPartition partition_from_cells(const Society& society, std::size_t carrier_count,
                                     std::span<const PartitionCell> cells) {
    ParsedPartition parsed;
    std::vector<std::optional<Location>> seen(carrier_count);
    for (const auto& cell : cells) {
        if (!in_range(society, cell.cell)) {
            parsed.issues.push_back({GoldenDefect::Shape, std::nullopt, "cell " + describe(cell.cell) + " is out of range"});
            continue;
        }
        for (CarrierId c : cell.carriers) {
            if (c.value >= carrier_count) {
                parsed.issues.push_back({GoldenDefect::Shape, c, "unknown carrier " + std::to_string(c.value)});
                continue;
            }
            if (seen[c.value]) {
                parsed.issues.push_back({GoldenDefect::PartitionDisjoint, c,
                                         "carrier " + std::to_string(c.value) + " is in both " +
                                             describe(*seen[c.value]) + " and " + describe(cell.cell)});
                continue;
            }
            seen[c.value] = cell.cell;
        }
    }
    std::vector<Location> locations(carrier_count);
    for (std::size_t c = 0; c < carrier_count; ++c) {
        if (seen[c]) {
            locations[c] = *seen[c];
        } else {
            parsed.issues.push_back({GoldenDefect::PartitionCover, CarrierId(c),
                                     "carrier " + std::to_string(c) + " is in no cell"});
        }
    }
    parsed.partition = GoldenPowerPartition(std::move(locations));
    return parsed;
}

std::vector<GoldenIssue> partition_issues(const Society& society, const CarrierRoster& roster,
                                          const GoldenPowerPartition& partition) {
    std::vector<GoldenIssue> issues;
    if (partition.carrier_count() != roster.size()) {
        issues.push_back({GoldenDefect::Shape, std::nullopt,
                          "partition places " + std::to_string(partition.carrier_count()) + " carriers, roster has " +
                              std::to_string(roster.size())});
        return issues;
    }
    // Build the set-valued view pi(x, a, y) over every cell and check that the
    // cells cover C and never share a carrier.
    std::map<Location, std::vector<CarrierId>> cells;
    for (std::size_t c = 0; c < partition.carrier_count(); ++c) {
        const Location& cell = partition[CarrierId(c)];
        if (!in_range(society, cell)) {
            issues.push_back({GoldenDefect::PartitionCover, CarrierId(c),
                              "carrier " + std::to_string(c) + " sits in out-of-range cell " + describe(cell)});
            continue;
        }
        cells[cell].emplace_back(c);
    }
    std::vector<int> multiplicity(roster.size(), 0);
    for (const auto& [cell, carriers] : cells)
        for (CarrierId c : carriers) ++multiplicity[c.value];
    for (std::size_t c = 0; c < roster.size(); ++c) {
        if (multiplicity[c] > 1)
            issues.push_back({GoldenDefect::PartitionDisjoint, CarrierId(c),
                              "carrier " + std::to_string(c) + " appears in several cells"});
    }
    return issues;
}

std::vector<GoldenIssue> golden_state_issues(const Society& society, const CarrierRoster& roster,
                                             const GoldenState& state) {
    std::vector<GoldenIssue> issues;
    if (state.assignment.size() != society.good_count()) {
        issues.push_back({GoldenDefect::Shape, std::nullopt, "assignment does not cover the estate"});
    } else {
        for (std::size_t a = 0; a < state.assignment.size(); ++a)
            if (state.assignment.owner[a].value >= society.person_count())
                issues.push_back({GoldenDefect::Shape, std::nullopt, "good " + std::to_string(a) + " has unknown owner"});
    }
    auto partition = partition_issues(society, roster, state.partition);
    issues.insert(issues.end(), partition.begin(), partition.end());
    if (state.idle.size() != roster.size() || state.selection.carrier_count() != roster.size()) {
        issues.push_back({GoldenDefect::Shape, std::nullopt, "idle or force table size differs from the roster"});
        return issues;
    }
    for (std::size_t c = 0; c < roster.size(); ++c) {
        const CarrierId id(c);
        if (state.idle[c] > roster[c].max_idle)
            issues.push_back({GoldenDefect::IdleBound, id,
                              "carrier " + std::to_string(c) + " idle " + std::to_string(state.idle[c]) +
                                  " exceeds theta " + std::to_string(roster[c].max_idle)});
        if (const auto& at = state.selection.where(id)) {
            if (c < state.partition.carrier_count() && *at != state.partition[id])
                issues.push_back({GoldenDefect::ExercisedOffLocation, id,
                                  "carrier " + std::to_string(c) + " exercised at " + describe(*at) + " but located at " +
                                      describe(state.partition[id])});
        } else if (state.idle[c] == roster[c].max_idle) {
            issues.push_back({GoldenDefect::MandatoryOmitted, id,
                              "carrier " + std::to_string(c) + " reached theta but was not exercised"});
        }
    }
    return issues;
}

void check_golden_state(const Society& society, const CarrierRoster& roster, const GoldenState& state) {
    const auto issues = golden_state_issues(society, roster, state);
    if (!issues.empty()) throw StateError(to_string(issues.front().defect) + ": " + issues.front().detail);
}

void check_golden_selection(const CarrierRoster& roster, const GoldenPowerPartition& partition,
                            const IdleTable& idle, const GoldenForceSelection& selection) {
    if (selection.carrier_count() != roster.size())
        throw StrategyViolation("selection covers " + std::to_string(selection.carrier_count()) +
                                    " carriers, roster has " + std::to_string(roster.size()),
                                std::nullopt);
    for (std::size_t c = 0; c < roster.size(); ++c) {
        const CarrierId id(c);
        const Location& home = partition[id];
        if (const auto& at = selection.where(id)) {
            if (*at != home)
                throw StrategyViolation("carrier " + std::to_string(c) + " exercised at " + describe(*at) +
                                            " but located at " + describe(home),
                                        home.from.value, c);
        } else if (idle[c] == roster[c].max_idle) {
            throw StrategyViolation("carrier " + std::to_string(c) + " reached its maximum idle period " +
                                        std::to_string(roster[c].max_idle) + " and must be exercised",
                                    home.from.value, c);
        }
    }
}

double golden_effectiveness(const Society& society, const CarrierRoster& roster, const GoldenState& state,
                            PersonId x, GoodId a, PersonId y) {
    if (x.value >= society.person_count() || y.value >= society.person_count() ||
        a.value >= society.good_count())
        throw std::out_of_range("golden_effectiveness: id out of range");
    double intensity = 0.0;
    for (CarrierId c : state.selection.carriers_at({x, a, y})) intensity += roster[c.value].intensity;
    if (intensity == 0.0) return 0.0;
    const PersonId owner = state.assignment[a];
    return intensity * society.relationship(x, owner) * society.relationship(owner, y);
}

ExtendedTables extended_tables(const Society& society, const CarrierRoster& roster, const GoldenState& state,
                               std::span<const PersonId> from, GoodId a, std::span<const PersonId> to) {
    ExtendedTables out;
    std::vector<bool> in_from(society.person_count()), in_to(society.person_count());
    for (PersonId x : from) in_from.at(x.value) = true;
    for (PersonId y : to) in_to.at(y.value) = true;

    for (std::size_t c = 0; c < state.partition.carrier_count(); ++c) {
        const Location& cell = state.partition[CarrierId(c)];
        if (cell.good == a && in_from[cell.from.value] && in_to[cell.to.value]) {
            out.power.emplace_back(c);
            if (state.selection.exercised(CarrierId(c))) out.force.emplace_back(c);
        }
    }
    for (std::size_t x = 0; x < society.person_count(); ++x) {
        if (!in_from[x]) continue;
        for (std::size_t y = 0; y < society.person_count(); ++y)
            if (in_to[y]) out.effectiveness += golden_effectiveness(society, roster, state, PersonId(x), a, PersonId(y));
    }
    return out;
}

std::vector<double> golden_win_distribution(const Society& society, const CarrierRoster& roster,
                                            const GoldenState& state, GoodId a) {
    const std::size_t n = society.person_count();
    std::vector<double> column(n, 0.0);
    double total = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
        for (std::size_t x = 0; x < n; ++x)
            column[w] += golden_effectiveness(society, roster, state, PersonId(x), a, PersonId(w));
        total += column[w];
    }
    std::vector<double> dist(n, 0.0);
    if (total != 0.0) {
        for (std::size_t w = 0; w < n; ++w) dist[w] = column[w] / total;
    } else {
        dist[state.assignment[a].value] = 1.0;
    }
    return dist;
}

GoldenLawResult golden_successor_laws(const GoldenState& state, std::span<const PersonId> winners) {
    GoldenLawResult out;
    out.assignment.owner.assign(winners.begin(), winners.end());
    out.partition = state.partition;
    out.idle = state.idle;
    for (std::size_t c = 0; c < state.partition.carrier_count(); ++c) {
        const CarrierId id(c);
        if (state.selection.exercised(id)) {
            out.partition[id] = state.partition[id].transposed();
            out.idle[c] = 0;
        } else {
            out.idle[c] = state.idle[c] + 1;
        }
    }
    return out;
}

GoldenStep golden_step(const Society& society, const CarrierRoster& roster, const GoldenState& state,
                       GoldenStrategy& strategy, RunStreams& streams, std::size_t step) {
    GoldenStep out;
    out.record.step = step;
    for (std::size_t a = 0; a < society.good_count(); ++a) {
        out.record.battles.push_back(settle_battle(
            GoodId(a), golden_win_distribution(society, roster, state, GoodId(a)), streams.lottery));
    }
    auto laws = golden_successor_laws(state, out.record.winners());
    out.state.assignment = std::move(laws.assignment);
    out.state.partition = std::move(laws.partition);
    out.state.idle = std::move(laws.idle);

    GoldenContext ctx{society, roster, out.state.assignment, out.state.partition, out.state.idle, step,
                      streams.strategy};
    out.state.selection = strategy.propose(ctx);
    check_golden_selection(roster, out.state.partition, out.state.idle, out.state.selection);
    return out;
}

nlohmann::json golden_state_to_json(const GoldenState& state) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : partition_cells(state.partition)) {
        nlohmann::json ids = nlohmann::json::array();
        for (CarrierId c : cell.carriers) ids.push_back(c.value);
        cells.push_back({cell.cell.from.value, cell.cell.good.value, cell.cell.to.value, ids});
    }
    nlohmann::json exercised = nlohmann::json::array();
    for (CarrierId c : state.selection.exercised_carriers()) {
        const Location& at = *state.selection.where(c);
        exercised.push_back({c.value, at.from.value, at.good.value, at.to.value});
    }
    return {{"alpha", assignment_to_json(state.assignment)},
            {"partition", cells},
            {"tau", state.idle},
            {"exercised", exercised}};
}

namespace {

Location location_from(const nlohmann::json& x, const nlohmann::json& a, const nlohmann::json& y) {
    return {PersonId(x.get<std::size_t>()), GoodId(a.get<std::size_t>()), PersonId(y.get<std::size_t>())};
}

}  // namespace

std::vector<PartitionCell> partition_cells_from_json(const nlohmann::json& doc) {
    std::vector<PartitionCell> cells;
    for (const auto& entry : doc) {
        if (!entry.is_array() || entry.size() != 4) throw StructuralError("expected [x, a, y, [carriers]] cell");
        PartitionCell cell{location_from(entry[0], entry[1], entry[2]), {}};
        for (const auto& c : entry[3]) cell.carriers.emplace_back(c.get<std::size_t>());
        cells.push_back(std::move(cell));
    }
    return cells;
}

GoldenState golden_state_from_json(const nlohmann::json& doc) {
    GoldenState state;
    state.assignment = assignment_from_json(doc.at("alpha"));
    state.idle = doc.at("tau").get<IdleTable>();
    const std::size_t carriers = state.idle.size();

    std::vector<Location> locations(carriers);
    std::vector<bool> placed(carriers, false);
    for (const auto& cell : partition_cells_from_json(doc.at("partition"))) {
        for (CarrierId c : cell.carriers) {
            if (c.value >= carriers || placed[c.value])
                throw StructuralError("partition cell lists carrier " + std::to_string(c.value) + " invalidly");
            locations[c.value] = cell.cell;
            placed[c.value] = true;
        }
    }
    for (std::size_t c = 0; c < carriers; ++c)
        if (!placed[c]) throw StructuralError("partition does not place carrier " + std::to_string(c));
    state.partition = GoldenPowerPartition(std::move(locations));

    state.selection = GoldenForceSelection(carriers);
    for (const auto& entry : doc.at("exercised")) {
        if (!entry.is_array() || entry.size() != 4) throw StructuralError("expected [carrier, x, a, y] exercise");
        const auto c = entry[0].get<std::size_t>();
        if (c >= carriers) throw StructuralError("exercise names unknown carrier " + std::to_string(c));
        state.selection.exercise(CarrierId(c), location_from(entry[1], entry[2], entry[3]));
    }
    return state;
}

}  // namespace everwill
