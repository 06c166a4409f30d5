#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "everwill/battle.hpp"
#include "everwill/rng.hpp"
#include "everwill/society.hpp"

namespace everwill {

/// phi: P x E -> non-negative reals, row-major by person.
class PrimitiveForceTable {
public:
    PrimitiveForceTable() = default;
    PrimitiveForceTable(std::size_t persons, std::size_t goods, double fill = 0.0)
        : persons_(persons), goods_(goods), values_(persons * goods, fill) {}

    std::size_t persons() const noexcept { return persons_; }
    std::size_t goods() const noexcept { return goods_; }

    double operator()(PersonId x, GoodId a) const { return values_[x.value * goods_ + a.value]; }
    double& operator()(PersonId x, GoodId a) { return values_[x.value * goods_ + a.value]; }

    /// Sum of phi(x, a) over the estate.
    double row_sum(PersonId x) const;

    friend bool operator==(const PrimitiveForceTable&, const PrimitiveForceTable&) = default;

private:
    std::size_t persons_ = 0;
    std::size_t goods_ = 0;
    std::vector<double> values_;
};

/// pi: P -> positive reals.
using PrimitivePowerTable = std::vector<double>;

struct PrimitiveState {
    SocialAssignment assignment;
    PrimitivePowerTable power;
    PrimitiveForceTable force;

    friend bool operator==(const PrimitiveState&, const PrimitiveState&) = default;
};

/// What a strategy may look at when choosing the next force table.
struct PrimitiveContext {
    const Society& society;
    const SocialAssignment& assignment;
    const PrimitivePowerTable& power;
    const PrimitiveForceTable* previous_force;  ///< null when bootstrapping sigma_0
    std::size_t step;
    Rng& rng;
};

class PrimitiveStrategy {
public:
    virtual ~PrimitiveStrategy() = default;
    virtual std::string name() const = 0;
    virtual PrimitiveForceTable propose(const PrimitiveContext& ctx) = 0;
};

/// Throws StateError unless shapes match, pi > 0 and sum_a phi(x,a) < pi(x).
void check_primitive_state(const Society& society, const PrimitiveState& state);

/// Throws StrategyViolation naming the first person whose forces are
/// negative, non-finite, or exceed the strict budget.
void check_primitive_force(const Society& society, const PrimitivePowerTable& power,
                           const PrimitiveForceTable& force);

/// psi(x, a) = phi(x, a) * rho(x, alpha(a)).
double primitive_effectiveness(const Society& society, const PrimitiveState& state, PersonId x,
                               GoodId a);

/// Probability of each person winning good a. When nobody has positive
/// effectiveness the incumbent keeps the good.
std::vector<double> primitive_win_distribution(const Society& society, const PrimitiveState& state,
                                               GoodId a);

/// Deterministic power law for given winners (one per good): winners pay
/// their committed force, losers split the payment in proportion to their
/// effectiveness. If no loser has positive effectiveness the payment is
/// shared equally; with a single person nothing is paid.
PrimitivePowerTable primitive_successor_power(const Society& society, const PrimitiveState& state,
                                              std::span<const PersonId> winners);

struct PrimitiveStep {
    PrimitiveState state;
    BattleRecord record;
};

/// One successor transition for any estate size. `step` is the index of the
/// state being produced; it stamps the record and is shown to the strategy.
PrimitiveStep primitive_step(const Society& society, const PrimitiveState& state,
                             PrimitiveStrategy& strategy, RunStreams& streams, std::size_t step = 1);

/// One successor transition written directly from the single-good law.
/// Throws std::invalid_argument unless |E| = 1.
PrimitiveStep primitive_step_single(const Society& society, const PrimitiveState& state,
                                    PrimitiveStrategy& strategy, RunStreams& streams,
                                    std::size_t step = 1);

nlohmann::json primitive_state_to_json(const PrimitiveState& state);
PrimitiveState primitive_state_from_json(const nlohmann::json& doc);

}  // namespace everwill
