#include "everwill/invariants.hpp"

#include <cmath>
#include <set>

#include "everwill/errors.hpp"
#include "everwill/rng.hpp"

namespace everwill {

bool InvariantReport::ok() const noexcept { return violations.empty(); }

std::optional<std::size_t> InvariantReport::first_violation(const std::string& check) const {
    std::optional<std::size_t> first;
    for (const auto& v : violations)
        if (check.empty() || v.check == check) first = first ? std::min(*first, v.step) : v.step;
    return first;
}

nlohmann::json InvariantReport::to_json() const {
    nlohmann::json bad = nlohmann::json::array();
    for (const auto& v : violations) bad.push_back({{"check", v.check}, {"step", v.step}, {"detail", v.detail}});
    nlohmann::json doc = {{"format_version", kFormatVersion},
                          {"model", to_string(model)},
                          {"states", states},
                          {"checks", checks},
                          {"ok", ok()},
                          {"violations", bad},
                          {"notes", notes}};
    if (reciprocity) doc["reciprocity"] = reciprocity->to_json();
    if (set_reciprocity)
        doc["set_reciprocity"] = {{"events", set_reciprocity->events},
                                  {"pending", set_reciprocity->pending},
                                  {"violations", set_reciprocity->violations}};
    return doc;
}

namespace {

struct LogFrame {
    ModelKind model;
    Society society;
    CarrierRoster roster;
    std::vector<nlohmann::json> snapshots;  ///< sigma_0..sigma_N as logged
    std::vector<BattleRecord> battles;      ///< battles[t-1] produced sigma_t
};

LogFrame frame_of(const HistoryLog& log) {
    try {
        const auto model = parse_model_kind(log.header.at("model").get<std::string>());
        LogFrame frame{model, society_from_json(log.header.at("society")), {}, {}, {}};
        if (model == ModelKind::Golden) frame.roster = roster_from_json(log.header.at("carriers"));
        frame.snapshots.push_back(log.header.at("initial"));
        for (const auto& record : log.steps) {
            const auto t = record.at("t").get<std::size_t>();
            if (!record.contains("snapshot"))
                throw SnapshotGapError("step " + std::to_string(t) +
                                       " has no state snapshot; the audit requires a log written with "
                                       "snapshot interval 1 (log.snapshot_interval = 1)");
            frame.battles.push_back(battles_from_json(t, record));
            frame.snapshots.push_back(record.at("snapshot"));
        }
        return frame;
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("malformed log: ") + e.what());
    }
}

class Auditor {
public:
    explicit Auditor(InvariantReport& report) : report_(report) {}

    void check(const char* name) {
        if (std::find(report_.checks.begin(), report_.checks.end(), name) == report_.checks.end())
            report_.checks.emplace_back(name);
    }
    void flag(const char* name, std::size_t step, std::string detail) {
        report_.violations.push_back({name, step, std::move(detail)});
    }

private:
    InvariantReport& report_;
};

/// Lottery support and logged distribution against the one recomputed from sigma_{t-1}.
void audit_lottery(Auditor& audit, std::size_t t, const BattleRecord& battles,
                   const std::vector<std::vector<double>>& expected, const SocialAssignment& next_owner) {
    audit.check("lottery");
    audit.check("assignment");
    if (battles.battles.size() != expected.size()) {
        audit.flag("lottery", t, "record has " + std::to_string(battles.battles.size()) + " battles, estate has " +
                                     std::to_string(expected.size()));
        return;
    }
    for (std::size_t a = 0; a < expected.size(); ++a) {
        const auto& b = battles.battles[a];
        const auto& dist = expected[a];
        if (b.winner.value >= dist.size() || dist[b.winner.value] <= 0.0)
            audit.flag("lottery", t, "winner of good " + std::to_string(a) + " had zero probability");
        if (b.distribution.size() != dist.size()) {
            audit.flag("lottery", t, "logged distribution for good " + std::to_string(a) + " has the wrong size");
        } else {
            for (std::size_t w = 0; w < dist.size(); ++w)
                if (std::abs(b.distribution[w] - dist[w]) > kLogTolerance)
                    audit.flag("lottery", t, "logged distribution for good " + std::to_string(a) +
                                                 " differs from the one implied by the previous state");
        }
        if (a >= next_owner.size() || next_owner.owner[a] != b.winner)
            audit.flag("assignment", t, "owner of good " + std::to_string(a) + " is not the battle winner");
    }
}

void audit_primitive(const LogFrame& frame, Auditor& audit) {
    const auto& society = frame.society;
    std::vector<PrimitiveState> states;
    for (const auto& snap : frame.snapshots) states.push_back(primitive_state_from_json(snap));

    auto sum = [](const PrimitiveState& s) {
        double total = 0.0;
        for (double v : s.power) total += v;
        return total;
    };
    const double initial_total = sum(states.front());
    audit.check("state");
    audit.check("conservation");
    audit.check("replay");
    for (std::size_t t = 0; t < states.size(); ++t) {
        try {
            check_primitive_state(society, states[t]);
        } catch (const std::exception& e) {
            audit.flag("state", t, e.what());
            continue;
        }
        if (t == 0) continue;
        const auto& prev = states[t - 1];
        const auto& next = states[t];
        const double drift_step = std::abs(sum(next) - sum(prev));
        const double drift_total = std::abs(sum(next) - initial_total);
        if (drift_step > kConservationTolerance || drift_total > kConservationTolerance)
            audit.flag("conservation", t, "total power moved by " + std::to_string(std::max(drift_step, drift_total)));

        std::vector<std::vector<double>> expected;
        try {
            for (std::size_t a = 0; a < society.good_count(); ++a)
                expected.push_back(primitive_win_distribution(society, prev, GoodId(a)));
            audit_lottery(audit, t, frame.battles[t - 1], expected, next.assignment);
            const auto power = primitive_successor_power(society, prev, frame.battles[t - 1].winners());
            if (power != next.power) audit.flag("replay", t, "power table differs from the law applied to sigma_" +
                                                                 std::to_string(t - 1));
        } catch (const std::exception& e) {
            audit.flag("replay", t, e.what());
        }
    }
}

void audit_good(const LogFrame& frame, Auditor& audit) {
    const auto& society = frame.society;
    const std::size_t n = society.person_count();
    const std::size_t m = society.good_count();
    std::vector<GoodState> states;
    for (const auto& snap : frame.snapshots) states.push_back(good_state_from_json(n, m, snap));

    const double initial_total = states.front().power.total();
    for (const char* name : {"state", "conservation", "antisymmetry", "diagonal", "replay"}) audit.check(name);
    for (std::size_t t = 0; t < states.size(); ++t) {
        try {
            check_good_state(society, states[t]);
        } catch (const std::exception& e) {
            audit.flag("state", t, e.what());
            continue;
        }
        if (t == 0) continue;
        const auto& prev = states[t - 1];
        const auto& next = states[t];
        const double drift_step = std::abs(next.power.total() - prev.power.total());
        const double drift_total = std::abs(next.power.total() - initial_total);
        if (drift_step > kConservationTolerance || drift_total > kConservationTolerance)
            audit.flag("conservation", t, "total power moved by " + std::to_string(std::max(drift_step, drift_total)));

        bool antisymmetric = true;
        bool diagonal = true;
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t a = 0; a < m; ++a) {
                const GoodId ga(a);
                if (next.power(PersonId(x), ga, PersonId(x)) != prev.power(PersonId(x), ga, PersonId(x))) diagonal = false;
                for (std::size_t y = x + 1; y < n; ++y) {
                    const double forward = next.power(PersonId(x), ga, PersonId(y)) - prev.power(PersonId(x), ga, PersonId(y));
                    const double backward = next.power(PersonId(y), ga, PersonId(x)) - prev.power(PersonId(y), ga, PersonId(x));
                    if (std::abs(forward + backward) > kLogTolerance) antisymmetric = false;
                }
            }
        if (!antisymmetric) audit.flag("antisymmetry", t, "a pair did not exchange equal and opposite power");
        if (!diagonal) audit.flag("diagonal", t, "a diagonal entry pi(x,a,x) changed");

        std::vector<std::vector<double>> expected;
        try {
            for (std::size_t a = 0; a < m; ++a) expected.push_back(good_win_distribution(society, prev, GoodId(a)));
            audit_lottery(audit, t, frame.battles[t - 1], expected, next.assignment);
            if (good_successor_power(prev) != next.power)
                audit.flag("replay", t, "power table differs from the law applied to sigma_" + std::to_string(t - 1));
        } catch (const std::exception& e) {
            audit.flag("replay", t, e.what());
        }
    }
}

/// Parses a golden snapshot without rejecting broken partitions.
GoldenState lenient_golden(const LogFrame& frame, const nlohmann::json& snap, std::vector<GoldenIssue>& issues) {
    GoldenState state;
    state.assignment = assignment_from_json(snap.at("alpha"));
    state.idle = snap.at("tau").get<IdleTable>();
    const auto cells = partition_cells_from_json(snap.at("partition"));
    auto parsed = partition_from_cells(frame.society, frame.roster.size(), cells);
    state.partition = std::move(parsed.partition);
    issues = std::move(parsed.issues);
    state.selection = GoldenForceSelection(frame.roster.size());
    for (const auto& entry : snap.at("exercised")) {
        const auto c = entry.at(0).get<std::size_t>();
        if (c >= frame.roster.size()) {
            issues.push_back({GoldenDefect::Shape, std::nullopt, "exercise names unknown carrier " + std::to_string(c)});
            continue;
        }
        state.selection.exercise(CarrierId(c), {PersonId(entry.at(1).get<std::size_t>()),
                                                GoodId(entry.at(2).get<std::size_t>()),
                                                PersonId(entry.at(3).get<std::size_t>())});
    }
    return state;
}

const char* check_name(GoldenDefect defect) {
    switch (defect) {
        case GoldenDefect::Shape:
        case GoldenDefect::PartitionCover:
        case GoldenDefect::PartitionDisjoint: return "partition";
        case GoldenDefect::IdleBound: return "idle-bound";
        case GoldenDefect::ExercisedOffLocation: return "selection";
        case GoldenDefect::MandatoryOmitted: return "mandatory";
    }
    return "partition";
}

/// Rectangles X x {a} x Y for the set-extended reciprocity check: every pair of
/// nonempty subsets when |P| <= 4, otherwise 32 seeded random pairs per good.
std::vector<Rectangle> audit_rectangles(const Society& society) {
    const std::size_t n = society.person_count();
    std::vector<std::vector<PersonId>> subsets;
    if (n <= 4) {
        for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
            std::vector<PersonId> s;
            for (std::size_t x = 0; x < n; ++x)
                if (mask & (std::size_t{1} << x)) s.emplace_back(x);
            subsets.push_back(std::move(s));
        }
    } else {
        Rng rng = make_stream(0, "audit-rectangles");
        for (int i = 0; i < 64; ++i) {
            std::vector<PersonId> s;
            for (std::size_t x = 0; x < n; ++x)
                if (rng.uniform() < 0.5) s.emplace_back(x);
            if (s.empty()) s.emplace_back(static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) % n);
            subsets.push_back(std::move(s));
        }
    }
    std::vector<Rectangle> rects;
    for (std::size_t a = 0; a < society.good_count(); ++a) {
        if (n <= 4) {
            for (const auto& from : subsets)
                for (const auto& to : subsets) rects.push_back({from, GoodId(a), to});
        } else {
            for (std::size_t i = 0; i + 1 < subsets.size(); i += 2) rects.push_back({subsets[i], GoodId(a), subsets[i + 1]});
        }
    }
    return rects;
}

void audit_golden(const LogFrame& frame, Auditor& audit, InvariantReport& report) {
    const auto& society = frame.society;
    const auto& roster = frame.roster;
    for (const char* name : {"partition", "idle-bound", "selection", "mandatory", "carrier-conservation", "relocation",
                             "idle-law", "degenerate-lottery"})
        audit.check(name);

    std::vector<GoldenState> states;
    std::vector<bool> sound;
    for (std::size_t t = 0; t < frame.snapshots.size(); ++t) {
        std::vector<GoldenIssue> issues;
        states.push_back(lenient_golden(frame, frame.snapshots[t], issues));
        const auto& state = states.back();
        std::set<std::size_t> covered;
        for (const auto& cell : partition_cells_from_json(frame.snapshots[t].at("partition")))
            for (CarrierId c : cell.carriers) covered.insert(c.value);
        if (covered.size() != roster.size())
            audit.flag("carrier-conservation", t,
                       "state holds " + std::to_string(covered.size()) + " carriers, roster has " + std::to_string(roster.size()));
        auto more = golden_state_issues(society, roster, state);
        issues.insert(issues.end(), more.begin(), more.end());
        for (const auto& issue : issues) audit.flag(check_name(issue.defect), t, issue.detail);
        sound.push_back(issues.empty());
    }

    for (std::size_t t = 1; t < states.size(); ++t) {
        if (!sound[t - 1] || !sound[t]) continue;
        const auto& prev = states[t - 1];
        const auto& next = states[t];
        std::vector<std::vector<double>> expected;
        for (std::size_t a = 0; a < society.good_count(); ++a) {
            expected.push_back(golden_win_distribution(society, roster, prev, GoodId(a)));
            const std::vector<PersonId> everyone = [&] {
                std::vector<PersonId> all;
                for (std::size_t x = 0; x < society.person_count(); ++x) all.emplace_back(x);
                return all;
            }();
            const double mass = extended_tables(society, roster, prev, everyone, GoodId(a), everyone).effectiveness;
            if (mass == 0.0 && next.assignment.owner[a] != prev.assignment.owner[a])
                audit.flag("degenerate-lottery", t,
                           "good " + std::to_string(a) + " changed owner although no force was exercised on it");
        }
        audit_lottery(audit, t, frame.battles[t - 1], expected, next.assignment);
        const auto laws = golden_successor_laws(prev, frame.battles[t - 1].winners());
        for (std::size_t c = 0; c < roster.size(); ++c) {
            const CarrierId id(c);
            if (laws.partition[id] != next.partition[id])
                audit.flag("relocation", t, "carrier " + std::to_string(c) + " is not where the relocation law puts it");
            if (laws.idle[c] != next.idle[c])
                audit.flag("idle-law", t, "carrier " + std::to_string(c) + " has idle count " + std::to_string(next.idle[c]) +
                                              ", law gives " + std::to_string(laws.idle[c]));
        }
    }

    audit.check("reciprocity");
    audit.check("set-reciprocity");
    if (!report.violations.empty()) {
        report.notes.emplace_back("reciprocity audit skipped: the history is not a chain of golden successors");
        return;
    }
    report.reciprocity = reciprocity_audit(society, roster, states);
    for (const auto& v : report.reciprocity->violations)
        audit.flag("reciprocity", v.exercised_at,
                   "carrier " + std::to_string(v.carrier.value) + " exercised at t=" + std::to_string(v.exercised_at) +
                       " was not reciprocated by t=" + std::to_string(v.deadline));
    const auto rects = audit_rectangles(society);
    report.set_reciprocity = set_reciprocity_audit(society, roster, states, rects);
    if (!report.set_reciprocity->ok())
        audit.flag("set-reciprocity", 0,
                   std::to_string(report.set_reciprocity->violations) + " set-level exercises were not reciprocated");
}

}  // namespace

InvariantReport check_invariants(const HistoryLog& log) {
    const auto frame = frame_of(log);
    InvariantReport report;
    report.model = frame.model;
    report.states = frame.snapshots.size();
    Auditor audit(report);
    try {
        switch (frame.model) {
            case ModelKind::Primitive: audit_primitive(frame, audit); break;
            case ModelKind::Good: audit_good(frame, audit); break;
            case ModelKind::Golden: audit_golden(frame, audit, report); break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("malformed snapshot: ") + e.what());
    }
    std::stable_sort(report.violations.begin(), report.violations.end(),
                     [](const InvariantViolation& a, const InvariantViolation& b) { return a.step < b.step; });
    return report;
}

ReplayReport replay_history(const HistoryLog& log) {
    const auto frame = frame_of(log);
    const auto& society = frame.society;
    ReplayReport report;
    for (std::size_t t = 1; t < frame.snapshots.size(); ++t) {
        ++report.steps_checked;
        const auto& prev_doc = frame.snapshots[t - 1];
        const auto& logged = frame.snapshots[t];
        const auto winners = frame.battles[t - 1].winners();
        nlohmann::json rebuilt;
        try {
            switch (frame.model) {
                case ModelKind::Primitive: {
                    const auto prev = primitive_state_from_json(prev_doc);
                    PrimitiveState next = primitive_state_from_json(logged);
                    next.assignment.owner = winners;
                    next.power = primitive_successor_power(society, prev, winners);
                    rebuilt = primitive_state_to_json(next);
                    break;
                }
                case ModelKind::Good: {
                    const auto prev = good_state_from_json(society.person_count(), society.good_count(), prev_doc);
                    GoodState next = good_state_from_json(society.person_count(), society.good_count(), logged);
                    next.assignment.owner = winners;
                    next.power = good_successor_power(prev);
                    rebuilt = good_state_to_json(next);
                    break;
                }
                case ModelKind::Golden: {
                    const auto prev = golden_state_from_json(prev_doc);
                    const auto laws = golden_successor_laws(prev, winners);
                    GoldenState next{laws.assignment, laws.partition, laws.idle, golden_state_from_json(logged).selection};
                    rebuilt = golden_state_to_json(next);
                    break;
                }
            }
        } catch (const std::exception&) {
            report.mismatches.push_back(t);
            continue;
        }
        if (rebuilt.dump() != logged.dump()) report.mismatches.push_back(t);
    }
    return report;
}

}  // namespace everwill
