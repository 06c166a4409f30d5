#include "everwill/reciprocity.hpp"

#include <algorithm>

#include "everwill/errors.hpp"

namespace everwill {

std::optional<std::string> golden_successor_mismatch(const Society& society, const CarrierRoster& roster,
                                                     const GoldenState& prev, const GoldenState& next) {
    for (const GoldenState* s : {&prev, &next}) {
        const auto issues = golden_state_issues(society, roster, *s);
        if (!issues.empty()) return to_string(issues.front().defect) + ": " + issues.front().detail;
    }
    for (std::size_t a = 0; a < society.good_count(); ++a) {
        const auto dist = golden_win_distribution(society, roster, prev, GoodId(a));
        if (dist[next.assignment.owner[a].value] <= 0.0)
            return "good " + std::to_string(a) + " went to person " + std::to_string(next.assignment.owner[a].value) +
                   " who had no chance of winning it";
    }
    const auto laws = golden_successor_laws(prev, next.assignment.owner);
    for (std::size_t c = 0; c < roster.size(); ++c) {
        const CarrierId id(c);
        if (laws.partition[id] != next.partition[id])
            return "carrier " + std::to_string(c) + " is not where the relocation law puts it";
        if (laws.idle[c] != next.idle[c])
            return "carrier " + std::to_string(c) + " idle count " + std::to_string(next.idle[c]) +
                   " does not follow the idle law (expected " + std::to_string(laws.idle[c]) + ")";
    }
    return std::nullopt;
}

namespace {

void require_chain(const Society& society, const CarrierRoster& roster, std::span<const GoldenState> history,
                   std::size_t horizon) {
    if (history.empty()) throw AuditInputError("empty history");
    if (horizon >= history.size())
        throw AuditInputError("horizon " + std::to_string(horizon) + " exceeds history of " +
                              std::to_string(history.size()) + " states");
    for (std::size_t t = 0; t < horizon; ++t) {
        if (auto why = golden_successor_mismatch(society, roster, history[t], history[t + 1]))
            throw AuditInputError("state " + std::to_string(t + 1) + " is not a successor of state " +
                                  std::to_string(t) + ": " + *why);
    }
}

}  // namespace

ReciprocityReport reciprocity_audit(const Society& society, const CarrierRoster& roster,
                                    std::span<const GoldenState> history, std::optional<std::size_t> horizon) {
    ReciprocityReport report;
    report.horizon = horizon.value_or(history.empty() ? 0 : history.size() - 1);
    require_chain(society, roster, history, report.horizon);
    report.per_carrier.resize(roster.size());

    for (std::size_t t1 = 0; t1 <= report.horizon; ++t1) {
        for (CarrierId c : history[t1].selection.exercised_carriers()) {
            ++report.events;
            const Location cell = *history[t1].selection.where(c);
            const Location mirror = cell.transposed();
            const std::size_t deadline = t1 + 1 + roster[c.value].max_idle;

            std::optional<std::size_t> t2;
            for (std::size_t t = t1 + 1; t <= report.horizon; ++t) {
                const auto& at = history[t].selection.where(c);
                if (at && *at == mirror) {
                    t2 = t;
                    break;
                }
            }
            if (t2 && *t2 <= deadline) {
                ++report.resolved;
                ++report.per_carrier[c.value].histogram[*t2 - t1];
            } else if (!t2 && deadline > report.horizon) {
                ++report.pending;
                ++report.per_carrier[c.value].pending;
            } else {
                report.violations.push_back({c, t1, cell, deadline, t2});
            }
        }
    }
    return report;
}

nlohmann::json ReciprocityReport::to_json() const {
    nlohmann::json carriers = nlohmann::json::array();
    for (std::size_t c = 0; c < per_carrier.size(); ++c) {
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [latency, count] : per_carrier[c].histogram) hist[std::to_string(latency)] = count;
        carriers.push_back({{"id", c}, {"latency", hist}, {"pending", per_carrier[c].pending}});
    }
    nlohmann::json bad = nlohmann::json::array();
    for (const auto& v : violations) {
        bad.push_back({{"carrier", v.carrier.value},
                       {"t1", v.exercised_at},
                       {"cell", {v.cell.from.value, v.cell.good.value, v.cell.to.value}},
                       {"deadline", v.deadline},
                       {"t2", v.reciprocated_at ? nlohmann::json(*v.reciprocated_at) : nlohmann::json(nullptr)}});
    }
    return {{"horizon", horizon},  {"events", events},     {"resolved", resolved},
            {"pending", pending},  {"carriers", carriers}, {"violations", bad}};
}

SetReciprocityReport set_reciprocity_audit(const Society& society, const CarrierRoster& roster,
                                           std::span<const GoldenState> history,
                                           std::span<const Rectangle> rectangles) {
    SetReciprocityReport report;
    if (history.empty()) return report;
    const std::size_t horizon = history.size() - 1;
    require_chain(society, roster, history, horizon);

    auto member = [](const std::vector<PersonId>& set, PersonId p) {
        return std::find(set.begin(), set.end(), p) != set.end();
    };
    for (std::size_t t1 = 0; t1 < history.size(); ++t1) {
        for (CarrierId c : history[t1].selection.exercised_carriers()) {
            const Location cell = *history[t1].selection.where(c);
            const std::size_t deadline = t1 + 1 + roster[c.value].max_idle;
            for (const auto& rect : rectangles) {
                if (rect.good != cell.good || !member(rect.from, cell.from) || !member(rect.to, cell.to)) continue;
                ++report.events;
                bool found = false;
                for (std::size_t t = t1 + 1; t <= std::min(deadline, horizon) && !found; ++t) {
                    const auto& at = history[t].selection.where(c);
                    found = at && at->good == rect.good && member(rect.to, at->from) && member(rect.from, at->to);
                }
                if (found) continue;
                if (deadline > horizon)
                    ++report.pending;
                else
                    ++report.violations;
            }
        }
    }
    return report;
}

}  // namespace everwill
