#include "everwill/good.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "everwill/errors.hpp"

namespace everwill {

double TripleTable::total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

void check_good_force(const Society& society, const GoodPowerTable& power, const GoodForceTable& force) {
    const std::size_t n = society.person_count();
    const std::size_t m = society.good_count();
    if (force.persons() != n || force.goods() != m)
        throw StrategyViolation("good force table has the wrong shape", std::nullopt);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t y = 0; y < n; ++y) {
                const PersonId px(x), py(y);
                const GoodId ga(a);
                const double f = force(px, ga, py);
                const double cap = std::min(power(px, ga, py), 1.0);
                if (!std::isfinite(f) || !(f > 0.0) || !(f < cap)) {
                    throw StrategyViolation("person " + std::to_string(x) + " force " + std::to_string(f) +
                                                " on (" + std::to_string(x) + ", " + std::to_string(a) +
                                                ", " + std::to_string(y) + ") is outside (0, " +
                                                std::to_string(cap) + ")",
                                            x);
                }
            }
}

void check_good_state(const Society& society, const GoodState& state) {
    check_assignment(society, state.assignment);
    const std::size_t n = society.person_count();
    const std::size_t m = society.good_count();
    if (state.power.persons() != n || state.power.goods() != m)
        throw StateError("good power table has the wrong shape");
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t y = 0; y < n; ++y) {
                const double p = state.power(PersonId(x), GoodId(a), PersonId(y));
                if (!std::isfinite(p) || p <= 0.0)
                    throw StateError("non-positive good power at (" + std::to_string(x) + ", " +
                                     std::to_string(a) + ", " + std::to_string(y) + ")");
            }
    try {
        check_good_force(society, state.power, state.force);
    } catch (const StrategyViolation& e) {
        throw StateError(e.what());
    }
}

double good_effectiveness(const Society& society, const GoodState& state, PersonId x, GoodId a,
                          PersonId y) {
    if (x.value >= society.person_count() || y.value >= society.person_count() ||
        a.value >= society.good_count())
        throw std::out_of_range("good_effectiveness: id out of range");
    const PersonId owner = state.assignment[a];
    return state.force(x, a, y) * society.relationship(x, owner) * society.relationship(owner, y);
}

std::vector<double> good_win_distribution(const Society& society, const GoodState& state, GoodId a) {
    const std::size_t n = society.person_count();
    std::vector<double> column(n, 0.0);
    double total = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
        for (std::size_t y = 0; y < n; ++y) column[w] += good_effectiveness(society, state, PersonId(y), a, PersonId(w));
        total += column[w];
    }
    if (!(total > 0.0)) throw StateError("good_win_distribution: effectiveness mass is zero");
    for (double& v : column) v /= total;
    return column;
}

GoodPowerTable good_successor_power(const GoodState& state) {
    GoodPowerTable next = state.power;
    const std::size_t n = state.power.persons();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < state.power.goods(); ++a)
            for (std::size_t y = 0; y < n; ++y) {
                const PersonId px(x), py(y);
                const GoodId ga(a);
                next(px, ga, py) = state.power(px, ga, py) + good_exchange(state, px, ga, py);
            }
    return next;
}

GoodStep good_step(const Society& society, const GoodState& state, GoodStrategy& strategy,
                   RunStreams& streams, std::size_t step) {
    GoodStep out;
    out.record.step = step;
    for (std::size_t a = 0; a < society.good_count(); ++a) {
        out.record.battles.push_back(
            settle_battle(GoodId(a), good_win_distribution(society, state, GoodId(a)), streams.lottery));
    }
    out.state.assignment.owner = out.record.winners();
    out.state.power = good_successor_power(state);

    GoodContext ctx{society, out.state.assignment, out.state.power, &state.force, step, streams.strategy};
    out.state.force = strategy.propose(ctx);
    check_good_force(society, out.state.power, out.state.force);
    return out;
}

nlohmann::json triple_table_to_json(const TripleTable& table) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t x = 0; x < table.persons(); ++x)
        for (std::size_t a = 0; a < table.goods(); ++a)
            for (std::size_t y = 0; y < table.persons(); ++y) {
                const double v = table(PersonId(x), GoodId(a), PersonId(y));
                if (v != 0.0) out.push_back(nlohmann::json::array({x, a, y, v}));
            }
    return out;
}

TripleTable triple_table_from_json(std::size_t persons, std::size_t goods, const nlohmann::json& doc,
                                   double fill) {
    TripleTable table(persons, goods, fill);
    for (const auto& quad : doc) {
        if (!quad.is_array() || quad.size() != 4) throw StructuralError("expected [x, a, y, value] quadruple");
        const auto x = quad[0].get<std::size_t>();
        const auto a = quad[1].get<std::size_t>();
        const auto y = quad[2].get<std::size_t>();
        if (x >= persons || y >= persons || a >= goods)
            throw StructuralError("quadruple index out of range");
        table(PersonId(x), GoodId(a), PersonId(y)) = quad[3].get<double>();
    }
    return table;
}

nlohmann::json good_state_to_json(const GoodState& state) {
    return {{"alpha", assignment_to_json(state.assignment)},
            {"power", triple_table_to_json(state.power)},
            {"force", triple_table_to_json(state.force)}};
}

GoodState good_state_from_json(std::size_t persons, std::size_t goods, const nlohmann::json& doc) {
    GoodState state;
    state.assignment = assignment_from_json(doc.at("alpha"));
    state.power = triple_table_from_json(persons, goods, doc.at("power"));
    state.force = triple_table_from_json(persons, goods, doc.at("force"));
    return state;
}

}  // namespace everwill
