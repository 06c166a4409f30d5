#include "everwill/battle.hpp"

#include <stdexcept>

namespace everwill {

std::vector<PersonId> BattleRecord::winners() const {
    std::vector<PersonId> out;
    out.reserve(battles.size());
    for (const auto& b : battles) out.push_back(b.winner);
    return out;
}

PersonId pick_winner(std::span<const double> distribution, double u) {
    if (distribution.empty()) throw std::invalid_argument("pick_winner: empty distribution");
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t w = 0; w < distribution.size(); ++w) {
        if (distribution[w] <= 0.0) continue;
        last_positive = w;
        cumulative += distribution[w];
        if (u < cumulative) return PersonId(w);
    }
    return PersonId(last_positive);
}

std::optional<PersonId> point_mass(std::span<const double> distribution) {
    std::optional<PersonId> found;
    for (std::size_t w = 0; w < distribution.size(); ++w) {
        if (distribution[w] == 0.0) continue;
        if (found) return std::nullopt;
        found = PersonId(w);
    }
    return found;
}

Battle settle_battle(GoodId good, std::vector<double> distribution, Rng& rng) {
    Battle b{good, PersonId{}, std::nullopt, std::move(distribution)};
    if (auto only = point_mass(b.distribution)) {
        b.winner = *only;
        return b;
    }
    const double u = rng.uniform();
    b.variate = u;
    b.winner = pick_winner(b.distribution, u);
    return b;
}

nlohmann::json battles_to_json(const BattleRecord& record) {
    nlohmann::json winners = nlohmann::json::array();
    nlohmann::json variates = nlohmann::json::array();
    nlohmann::json dists = nlohmann::json::array();
    for (const auto& b : record.battles) {
        winners.push_back(b.winner.value);
        variates.push_back(b.variate ? nlohmann::json(*b.variate) : nlohmann::json(nullptr));
        dists.push_back(b.distribution);
    }
    return {{"winners", winners}, {"u", variates}, {"dist", dists}};
}

BattleRecord battles_from_json(std::size_t step, const nlohmann::json& doc) {
    BattleRecord record;
    record.step = step;
    const auto& winners = doc.at("winners");
    const auto& variates = doc.at("u");
    const auto& dists = doc.at("dist");
    if (variates.size() != winners.size() || dists.size() != winners.size())
        throw std::invalid_argument("battle record arrays differ in length");
    for (std::size_t a = 0; a < winners.size(); ++a) {
        Battle b;
        b.good = GoodId(a);
        b.winner = PersonId(winners[a].get<std::size_t>());
        if (!variates[a].is_null()) b.variate = variates[a].get<double>();
        b.distribution = dists[a].get<std::vector<double>>();
        record.battles.push_back(std::move(b));
    }
    return record;
}

}  // namespace everwill
