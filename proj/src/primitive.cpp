#include "everwill/primitive.hpp"

#include <cmath>
#include <stdexcept>

#include "everwill/errors.hpp"

namespace everwill {

double PrimitiveForceTable::row_sum(PersonId x) const {
    double s = 0.0;
    for (std::size_t a = 0; a < goods_; ++a) s += values_[x.value * goods_ + a];
    return s;
}

void check_primitive_force(const Society& society, const PrimitivePowerTable& power,
                           const PrimitiveForceTable& force) {
    if (force.persons() != society.person_count() || force.goods() != society.good_count())
        throw StrategyViolation("force table has shape " + std::to_string(force.persons()) + "x" +
                                    std::to_string(force.goods()) + ", expected " +
                                    std::to_string(society.person_count()) + "x" +
                                    std::to_string(society.good_count()),
                                std::nullopt);
    for (std::size_t x = 0; x < force.persons(); ++x) {
        for (std::size_t a = 0; a < force.goods(); ++a) {
            const double f = force(PersonId(x), GoodId(a));
            if (!std::isfinite(f) || f < 0.0)
                throw StrategyViolation("person " + std::to_string(x) + " has invalid force " +
                                            std::to_string(f) + " on good " + std::to_string(a),
                                        x);
        }
        const double total = force.row_sum(PersonId(x));
        if (!(total < power[x]))
            throw StrategyViolation("person " + std::to_string(x) + " commits force " +
                                        std::to_string(total) + " but has power " +
                                        std::to_string(power[x]),
                                    x);
    }
}

void check_primitive_state(const Society& society, const PrimitiveState& state) {
    check_assignment(society, state.assignment);
    if (state.power.size() != society.person_count())
        throw StateError("power table has " + std::to_string(state.power.size()) + " entries");
    for (std::size_t x = 0; x < state.power.size(); ++x) {
        if (!std::isfinite(state.power[x]) || state.power[x] <= 0.0)
            throw StateError("person " + std::to_string(x) + " has non-positive power");
    }
    try {
        check_primitive_force(society, state.power, state.force);
    } catch (const StrategyViolation& e) {
        throw StateError(e.what());
    }
}

double primitive_effectiveness(const Society& society, const PrimitiveState& state, PersonId x,
                               GoodId a) {
    if (x.value >= society.person_count() || a.value >= society.good_count())
        throw std::out_of_range("primitive_effectiveness: id out of range");
    return state.force(x, a) * society.relationship(x, state.assignment[a]);
}

std::vector<double> primitive_win_distribution(const Society& society, const PrimitiveState& state,
                                               GoodId a) {
    const std::size_t n = society.person_count();
    std::vector<double> psi(n);
    double total = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
        psi[y] = primitive_effectiveness(society, state, PersonId(y), a);
        total += psi[y];
    }
    std::vector<double> dist(n, 0.0);
    if (total > 0.0) {
        for (std::size_t y = 0; y < n; ++y) dist[y] = psi[y] / total;
    } else {
        dist[state.assignment[a].value] = 1.0;
    }
    return dist;
}

PrimitivePowerTable primitive_successor_power(const Society& society, const PrimitiveState& state,
                                              std::span<const PersonId> winners) {
    const std::size_t n = society.person_count();
    if (winners.size() != society.good_count())
        throw std::invalid_argument("primitive_successor_power: need one winner per good");

    PrimitivePowerTable next = state.power;
    for (std::size_t a = 0; a < winners.size(); ++a) {
        const GoodId good(a);
        const PersonId w = winners[a];
        if (w.value >= n) throw std::out_of_range("primitive_successor_power: winner out of range");
        if (n == 1) continue;

        const double payment = state.force(w, good);
        std::vector<double> psi(n);
        double losers_total = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            psi[y] = primitive_effectiveness(society, state, PersonId(y), good);
            if (y != w.value) losers_total += psi[y];
        }

        next[w.value] -= payment;
        for (std::size_t x = 0; x < n; ++x) {
            if (x == w.value) continue;
            const double share = losers_total > 0.0 ? psi[x] / losers_total
                                                    : 1.0 / static_cast<double>(n - 1);
            next[x] += payment * share;
        }
    }
    return next;
}

namespace {

PrimitiveForceTable next_force(const Society& society, const SocialAssignment& assignment,
                               const PrimitivePowerTable& power, const PrimitiveForceTable& previous,
                               PrimitiveStrategy& strategy, RunStreams& streams, std::size_t step) {
    PrimitiveContext ctx{society, assignment, power, &previous, step, streams.strategy};
    auto force = strategy.propose(ctx);
    check_primitive_force(society, power, force);
    return force;
}

}  // namespace

PrimitiveStep primitive_step(const Society& society, const PrimitiveState& state,
                             PrimitiveStrategy& strategy, RunStreams& streams, std::size_t step) {
    PrimitiveStep out;
    out.record.step = step;
    for (std::size_t a = 0; a < society.good_count(); ++a) {
        out.record.battles.push_back(
            settle_battle(GoodId(a), primitive_win_distribution(society, state, GoodId(a)), streams.lottery));
    }
    const auto winners = out.record.winners();
    out.state.assignment.owner = winners;
    out.state.power = primitive_successor_power(society, state, winners);
    out.state.force = next_force(society, out.state.assignment, out.state.power, state.force, strategy,
                                 streams, step);
    return out;
}

PrimitiveStep primitive_step_single(const Society& society, const PrimitiveState& state,
                                    PrimitiveStrategy& strategy, RunStreams& streams,
                                    std::size_t step) {
    if (society.good_count() != 1)
        throw std::invalid_argument("primitive_step_single requires an estate of exactly one good");

    const GoodId good(0);
    const std::size_t n = society.person_count();

    PrimitiveStep out;
    out.record.step = step;
    out.record.battles.push_back(
        settle_battle(good, primitive_win_distribution(society, state, good), streams.lottery));
    const PersonId w = out.record.battles.front().winner;

    // pi'(w) = pi(w) - phi(w,a); every other x receives
    // phi(w,a) * psi(x,a) / sum_{y != w} psi(y,a).
    out.state.assignment.owner = {w};
    out.state.power = state.power;
    if (n > 1) {
        const double payment = state.force(w, good);
        double denominator = 0.0;
        for (std::size_t y = 0; y < n; ++y)
            if (y != w.value) denominator += primitive_effectiveness(society, state, PersonId(y), good);
        out.state.power[w.value] = state.power[w.value] - payment;
        for (std::size_t x = 0; x < n; ++x) {
            if (x == w.value) continue;
            const double ratio =
                denominator > 0.0 ? primitive_effectiveness(society, state, PersonId(x), good) / denominator
                                  : 1.0 / static_cast<double>(n - 1);
            out.state.power[x] = state.power[x] + payment * ratio;
        }
    }
    out.state.force = next_force(society, out.state.assignment, out.state.power, state.force, strategy,
                                 streams, step);
    return out;
}

nlohmann::json primitive_state_to_json(const PrimitiveState& state) {
    nlohmann::json force = nlohmann::json::array();
    for (std::size_t x = 0; x < state.force.persons(); ++x) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t a = 0; a < state.force.goods(); ++a) row.push_back(state.force(PersonId(x), GoodId(a)));
        force.push_back(std::move(row));
    }
    return {{"alpha", assignment_to_json(state.assignment)}, {"power", state.power}, {"force", force}};
}

PrimitiveState primitive_state_from_json(const nlohmann::json& doc) {
    PrimitiveState state;
    state.assignment = assignment_from_json(doc.at("alpha"));
    state.power = doc.at("power").get<std::vector<double>>();
    const auto rows = doc.at("force").get<std::vector<std::vector<double>>>();
    const std::size_t goods = rows.empty() ? 0 : rows.front().size();
    state.force = PrimitiveForceTable(rows.size(), goods);
    for (std::size_t x = 0; x < rows.size(); ++x) {
        if (rows[x].size() != goods) throw StructuralError("ragged primitive force table");
        for (std::size_t a = 0; a < goods; ++a) state.force(PersonId(x), GoodId(a)) = rows[x][a];
    }
    return state;
}

}  // namespace everwill
