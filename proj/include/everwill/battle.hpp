#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "everwill/ids.hpp"
#include "everwill/rng.hpp"

namespace everwill {

/// Outcome of the lottery over one good in one step.
struct Battle {
    GoodId good;
    PersonId winner;
    /// Uniform variate that decided the battle; empty when the distribution
    /// was degenerate and no variate was drawn.
    std::optional<double> variate;
    std::vector<double> distribution;

    friend bool operator==(const Battle&, const Battle&) = default;
};

struct BattleRecord {
    std::size_t step = 0;
    std::vector<Battle> battles;  ///< ascending GoodId

    std::vector<PersonId> winners() const;
    friend bool operator==(const BattleRecord&, const BattleRecord&) = default;
};

/// Index of the winner for variate u in [0,1): the first w whose cumulative
/// probability exceeds u. Rounding slack at the top goes to the last person
/// with positive mass.
PersonId pick_winner(std::span<const double> distribution, double u);

/// True if the distribution puts all of its mass on a single person.
std::optional<PersonId> point_mass(std::span<const double> distribution);

/// Draws one battle. Point-mass distributions are settled without consuming a variate.
Battle settle_battle(GoodId good, std::vector<double> distribution, Rng& rng);

nlohmann::json battles_to_json(const BattleRecord& record);
BattleRecord battles_from_json(std::size_t step, const nlohmann::json& doc);

}  // namespace everwill
