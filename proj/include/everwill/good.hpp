#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "everwill/battle.hpp"
#include "everwill/rng.hpp"
#include "everwill/society.hpp"

namespace everwill {

/// Dense table over P x E x P, indexed (x, a, y): "x desires that a be owned by y".
class TripleTable {
public:
    TripleTable() = default;
    TripleTable(std::size_t persons, std::size_t goods, double fill = 0.0)
        : persons_(persons), goods_(goods), values_(persons * goods * persons, fill) {}

    std::size_t persons() const noexcept { return persons_; }
    std::size_t goods() const noexcept { return goods_; }

    double operator()(PersonId x, GoodId a, PersonId y) const { return values_[index(x, a, y)]; }
    double& operator()(PersonId x, GoodId a, PersonId y) { return values_[index(x, a, y)]; }

    double total() const;

    friend bool operator==(const TripleTable&, const TripleTable&) = default;

private:
    std::size_t index(PersonId x, GoodId a, PersonId y) const {
        return (x.value * goods_ + a.value) * persons_ + y.value;
    }

    std::size_t persons_ = 0;
    std::size_t goods_ = 0;
    std::vector<double> values_;
};

using GoodPowerTable = TripleTable;
using GoodForceTable = TripleTable;

struct GoodState {
    SocialAssignment assignment;
    GoodPowerTable power;
    GoodForceTable force;

    friend bool operator==(const GoodState&, const GoodState&) = default;
};

struct GoodContext {
    const Society& society;
    const SocialAssignment& assignment;
    const GoodPowerTable& power;
    const GoodForceTable* previous_force;  ///< null when bootstrapping sigma_0
    std::size_t step;
    Rng& rng;
};

class GoodStrategy {
public:
    virtual ~GoodStrategy() = default;
    virtual std::string name() const = 0;
    virtual GoodForceTable propose(const GoodContext& ctx) = 0;
};

/// Throws StrategyViolation unless 0 < phi(x,a,y) < min(pi(x,a,y), 1) everywhere.
void check_good_force(const Society& society, const GoodPowerTable& power, const GoodForceTable& force);

/// Throws StateError unless shapes match, pi > 0 and the force bound holds.
void check_good_state(const Society& society, const GoodState& state);

/// psi(x, a, y) = phi(x, a, y) * rho(x, alpha(a)) * rho(alpha(a), y).
double good_effectiveness(const Society& society, const GoodState& state, PersonId x, GoodId a,
                          PersonId y);

/// P(w wins a) = sum_y psi(y, a, w) / sum_{y,z} psi(y, a, z).
std::vector<double> good_win_distribution(const Society& society, const GoodState& state, GoodId a);

/// Net power that (x, a, y) receives from its mirror entry: phi(y,a,x) - phi(x,a,y).
/// Exactly antisymmetric under swapping x and y.
inline double good_exchange(const GoodState& state, PersonId x, GoodId a, PersonId y) {
    return state.force(y, a, x) - state.force(x, a, y);
}

/// pi'(x, a, y) = pi(x, a, y) - phi(x, a, y) + phi(y, a, x). Does not depend on the winners.
GoodPowerTable good_successor_power(const GoodState& state);

struct GoodStep {
    GoodState state;
    BattleRecord record;
};

GoodStep good_step(const Society& society, const GoodState& state, GoodStrategy& strategy,
                   RunStreams& streams, std::size_t step = 1);

/// Sparse [x, a, y, value] quadruples.
nlohmann::json triple_table_to_json(const TripleTable& table);
TripleTable triple_table_from_json(std::size_t persons, std::size_t goods, const nlohmann::json& doc,
                                   double fill = 0.0);

nlohmann::json good_state_to_json(const GoodState& state);
GoodState good_state_from_json(std::size_t persons, std::size_t goods, const nlohmann::json& doc);

}  // namespace everwill
