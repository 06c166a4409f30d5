#include <doctest.h>

#include <cmath>

#include "everwill/errors.hpp"
#include "everwill/primitive.hpp"
#include "everwill/strategies.hpp"
#include "oracles.hpp"

using namespace everwill;

namespace {

Society two_people(double rho = 0.5, std::size_t goods = 1) {
    return Society(2, goods, RelationshipTable::from_rows({{1.0, rho}, {rho, 1.0}}));
}

/// rho(0,1)=0.5, rho(0,2)=0.8, rho(1,2)=0.6
Society three_people(std::size_t goods = 1) {
    return Society(3, goods, RelationshipTable::from_rows({{1.0, 0.5, 0.8}, {0.5, 1.0, 0.6}, {0.8, 0.6, 1.0}}));
}

PrimitiveState make_state(const Society& s, std::vector<double> power, std::vector<std::vector<double>> force,
                          std::vector<std::size_t> owners) {
    PrimitiveState st;
    for (auto o : owners) st.assignment.owner.emplace_back(o);
    st.power = std::move(power);
    st.force = PrimitiveForceTable(s.person_count(), s.good_count());
    for (std::size_t x = 0; x < force.size(); ++x)
        for (std::size_t a = 0; a < force[x].size(); ++a) st.force(PersonId(x), GoodId(a)) = force[x][a];
    return st;
}

oracle::PrimitiveInstance to_oracle(const Society& s, const PrimitiveState& st) {
    oracle::PrimitiveInstance in;
    in.rho = s.relationships().rows();
    for (auto p : st.assignment.owner) in.owner.push_back(p.value);
    in.power = st.power;
    in.force.assign(s.person_count(), std::vector<double>(s.good_count()));
    for (std::size_t x = 0; x < s.person_count(); ++x)
        for (std::size_t a = 0; a < s.good_count(); ++a) in.force[x][a] = st.force(PersonId(x), GoodId(a));
    return in;
}

/// Random valid primitive state; some rows are zero to reach the fallbacks.
PrimitiveState random_state(const Society& s, Rng& rng) {
    PrimitiveState st;
    for (std::size_t a = 0; a < s.good_count(); ++a)
        st.assignment.owner.emplace_back(static_cast<std::size_t>(rng.uniform() * static_cast<double>(s.person_count())));
    st.force = PrimitiveForceTable(s.person_count(), s.good_count());
    for (std::size_t x = 0; x < s.person_count(); ++x) {
        st.power.push_back(0.1 + 2.0 * rng.uniform());
        const bool idle = rng.uniform() < 0.3;
        const double budget = 0.95 * st.power.back() / static_cast<double>(s.good_count());
        for (std::size_t a = 0; a < s.good_count(); ++a)
            st.force(PersonId(x), GoodId(a)) = idle || rng.uniform() < 0.2 ? 0.0 : budget * rng.uniform();
    }
    return st;
}

class FixedForce final : public PrimitiveStrategy {
public:
    explicit FixedForce(PrimitiveForceTable f) : force_(std::move(f)) {}
    std::string name() const override { return "fixed"; }
    PrimitiveForceTable propose(const PrimitiveContext&) override { return force_; }

private:
    PrimitiveForceTable force_;
};

}  // namespace

TEST_CASE("primitive_effectiveness") {
    const auto s = two_people(0.5);
    SUBCASE("zero force") {
        const auto st = make_state(s, {1.0, 1.0}, {{0.0}, {0.0}}, {0});
        CHECK(primitive_effectiveness(s, st, PersonId(1), GoodId(0)) == 0.0);
    }
    SUBCASE("owner pushes on its own good") {
        const auto st = make_state(s, {1.0, 1.0}, {{0.3}, {0.0}}, {0});
        CHECK(primitive_effectiveness(s, st, PersonId(0), GoodId(0)) == doctest::Approx(0.3).epsilon(1e-15));
    }
    SUBCASE("discounted by the relationship to the owner") {
        const auto st = make_state(s, {1.0, 1.0}, {{0.0}, {0.2}}, {0});
        CHECK(primitive_effectiveness(s, st, PersonId(1), GoodId(0)) == doctest::Approx(0.1).epsilon(1e-15));
    }
    SUBCASE("range check") {
        const auto st = make_state(s, {1.0, 1.0}, {{0.0}, {0.2}}, {0});
        CHECK_THROWS_AS(primitive_effectiveness(s, st, PersonId(2), GoodId(0)), std::out_of_range);
    }
}

TEST_CASE("primitive_win_distribution") {
    SUBCASE("hand example: psi = (0.3, 0.1)") {
        const auto s = two_people(0.5);
        const auto st = make_state(s, {1.0, 1.0}, {{0.3}, {0.2}}, {0});
        const auto d = primitive_win_distribution(s, st, GoodId(0));
        CHECK(d[0] == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(d[1] == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("nobody pushes: incumbent keeps the good") {
        const auto s = three_people();
        const auto st = make_state(s, {1.0, 1.0, 1.0}, {{0.0}, {0.0}, {0.0}}, {2});
        CHECK(primitive_win_distribution(s, st, GoodId(0)) == std::vector<double>{0.0, 0.0, 1.0});
    }
    SUBCASE("singleton society") {
        const Society s(1, 1, RelationshipTable::from_rows({{1.0}}));
        const auto st = make_state(s, {1.0}, {{0.4}}, {0});
        CHECK(primitive_win_distribution(s, st, GoodId(0)) == std::vector<double>{1.0});
    }
}

TEST_CASE("property: win distributions are normalized and non-negative") {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const std::size_t m = 1 + trial % 4;
        const Society s(n, m, generate_relationships(n, trial));
        const auto st = random_state(s, rng);
        for (std::size_t a = 0; a < m; ++a) {
            const auto d = primitive_win_distribution(s, st, GoodId(a));
            double sum = 0.0;
            for (double p : d) {
                CHECK(p >= 0.0);
                sum += p;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("primitive_successor_power: forced winner with the empty-loser fallback") {
    // phi(q,a)=0 so p wins with certainty; q has psi = 0, so the payment goes to q in full.
    const auto s = two_people(0.5);
    const auto st = make_state(s, {1.0, 1.0}, {{0.4}, {0.0}}, {1});
    CHECK(primitive_win_distribution(s, st, GoodId(0)) == std::vector<double>{1.0, 0.0});
    const std::vector<PersonId> winners{PersonId(0)};
    const auto next = primitive_successor_power(s, st, winners);
    CHECK(next[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(next[1] == doctest::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("primitive_successor_power matches the enumeration oracle on |P|=2, |E|=2") {
    const auto s = two_people(0.35, 2);
    const auto st = make_state(s, {1.3, 0.7}, {{0.4, 0.5}, {0.25, 0.2}}, {0, 1});
    const auto in = to_oracle(s, st);
    for (std::size_t w0 = 0; w0 < 2; ++w0)
        for (std::size_t w1 = 0; w1 < 2; ++w1) {
            const std::vector<PersonId> winners{PersonId(w0), PersonId(w1)};
            const auto engine = primitive_successor_power(s, st, winners);
            const auto expected = oracle::successor_power(in, {w0, w1});
            double before = 0.0, after = 0.0;
            for (std::size_t x = 0; x < 2; ++x) {
                CHECK(std::abs(engine[x] - expected[x]) <= 1e-12);
                before += st.power[x];
                after += engine[x];
            }
            CHECK(std::abs(after - before) <= 1e-9);
        }
}

TEST_CASE("property: conservation and positivity on every winner combination") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const std::size_t m = 1 + (trial / 4) % 3;
        const Society s(n, m, generate_relationships(n, 1000 + trial));
        const auto st = random_state(s, rng);
        REQUIRE_NOTHROW(check_primitive_state(s, st));
        const auto in = to_oracle(s, st);
        double before = 0.0;
        for (double p : st.power) before += p;

        std::vector<std::size_t> combo(m, 0);
        while (true) {
            std::vector<PersonId> winners;
            for (auto w : combo) winners.emplace_back(w);
            const auto next = primitive_successor_power(s, st, winners);
            const auto expected = oracle::successor_power(in, combo);
            double after = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                CHECK(next[x] > 0.0);
                CHECK(std::abs(next[x] - expected[x]) <= 1e-12);
                after += next[x];
            }
            CHECK(std::abs(after - before) <= 1e-9);
            std::size_t a = 0;
            while (a < m && ++combo[a] == n) combo[a++] = 0;
            if (a == m) break;
        }
    }
}

TEST_CASE("primitive_step: zero force is a fixed point") {
    const auto s = three_people(2);
    const auto st = make_state(s, {1.0, 2.0, 3.0}, {{0, 0}, {0, 0}, {0, 0}}, {1, 2});
    ZeroForce zero;
    auto streams = RunStreams::from_seed(4);
    const auto out = primitive_step(s, st, zero, streams);
    CHECK(out.state == st);
    for (const auto& b : out.record.battles) CHECK_FALSE(b.variate.has_value());
}

TEST_CASE("primitive_step records the battles and is deterministic") {
    const auto s = three_people(2);
    const auto st = make_state(s, {1.0, 1.0, 1.0}, {{0.2, 0.3}, {0.4, 0.1}, {0.1, 0.5}}, {0, 1});
    UniformSelfish strategy(0.5);
    auto a_streams = RunStreams::from_seed(9);
    auto b_streams = RunStreams::from_seed(9);
    const auto a = primitive_step(s, st, strategy, a_streams, 3);
    const auto b = primitive_step(s, st, strategy, b_streams, 3);
    CHECK(a.state == b.state);
    CHECK(a.record == b.record);
    CHECK(a.record.step == 3);
    REQUIRE(a.record.battles.size() == 2);
    for (std::size_t g = 0; g < 2; ++g) {
        const auto& battle = a.record.battles[g];
        CHECK(battle.good == GoodId(g));
        CHECK(battle.distribution == primitive_win_distribution(s, st, GoodId(g)));
        REQUIRE(battle.variate.has_value());
        CHECK(battle.winner == pick_winner(battle.distribution, *battle.variate));
        CHECK(a.state.assignment[GoodId(g)] == battle.winner);
    }
}

TEST_CASE("primitive_step rejects an infeasible strategy and names the person") {
    const auto s = two_people();
    const auto st = make_state(s, {1.0, 1.0}, {{0.2}, {0.2}}, {0});
    PrimitiveForceTable greedy(2, 1);
    greedy(PersonId(1), GoodId(0)) = 5.0;
    FixedForce bad(greedy);
    auto streams = RunStreams::from_seed(1);
    try {
        primitive_step(s, st, bad, streams);
        FAIL("expected a strategy violation");
    } catch (const StrategyViolation& e) {
        CHECK(e.person() == std::optional<std::size_t>(1));
    }
    PrimitiveForceTable negative(2, 1);
    negative(PersonId(0), GoodId(0)) = -0.1;
    FixedForce neg(negative);
    CHECK_THROWS_AS(primitive_step(s, st, neg, streams), StrategyViolation);
}

TEST_CASE("primitive_step_single follows the single-good law on a 3-person instance") {
    // psi = (0.2*1, 0.4*0.5, 0.5*0.8) = (0.2, 0.2, 0.4); pi = (1, 1, 1).
    const auto s = three_people();
    const auto st = make_state(s, {1.0, 1.0, 1.0}, {{0.2}, {0.4}, {0.5}}, {0});
    const std::vector<std::vector<double>> expected{
        {0.8, 1.0 + 0.2 / 3.0, 1.0 + 0.4 / 3.0},  // w = 0: shares 0.2/0.6, 0.4/0.6
        {1.0 + 0.4 / 3.0, 0.6, 1.0 + 0.8 / 3.0},  // w = 1: shares 0.2/0.6, 0.4/0.6
        {1.25, 1.25, 0.5},                        // w = 2: shares 0.2/0.4, 0.2/0.4
    };
    ZeroForce zero;
    std::vector<bool> seen(3, false);
    for (std::uint64_t seed = 0; seed < 200 && !(seen[0] && seen[1] && seen[2]); ++seed) {
        auto streams = RunStreams::from_seed(seed);
        const auto out = primitive_step_single(s, st, zero, streams);
        const auto w = out.record.battles.front().winner.value;
        seen[w] = true;
        for (std::size_t x = 0; x < 3; ++x) CHECK(out.state.power[x] == doctest::Approx(expected[w][x]).epsilon(1e-14));
    }
    CHECK((seen[0] && seen[1] && seen[2]));
}

TEST_CASE("primitive_step_single agrees with primitive_step on singleton estates") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 5;
        const Society s(n, 1, generate_relationships(n, trial));
        const auto st = random_state(s, rng);
        for (std::size_t w = 0; w < n; ++w) {
            const std::vector<PersonId> winners{PersonId(w)};
            const auto general = primitive_successor_power(s, st, winners);
            const auto in = to_oracle(s, st);
            const auto literal = oracle::successor_power(in, {w});
            for (std::size_t x = 0; x < n; ++x) CHECK(std::abs(general[x] - literal[x]) <= 1e-12);
        }
        UniformSelfish strategy(0.5);
        auto a = RunStreams::from_seed(trial);
        auto b = RunStreams::from_seed(trial);
        const auto single = primitive_step_single(s, st, strategy, a);
        const auto full = primitive_step(s, st, strategy, b);
        CHECK(single.record == full.record);
        for (std::size_t x = 0; x < n; ++x)
            CHECK(std::abs(single.state.power[x] - full.state.power[x]) <= 1e-12);
    }
}

TEST_CASE("primitive_step_single requires exactly one good") {
    const auto s = two_people(0.5, 2);
    const auto st = make_state(s, {1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}, {0, 1});
    ZeroForce zero;
    auto streams = RunStreams::from_seed(1);
    CHECK_THROWS_AS(primitive_step_single(s, st, zero, streams), std::invalid_argument);
}

TEST_CASE("single-person society: the winner pays nothing") {
    const Society s(1, 2, RelationshipTable::from_rows({{1.0}}));
    const auto st = make_state(s, {1.0}, {{0.3, 0.4}}, {0, 0});
    const std::vector<PersonId> winners{PersonId(0), PersonId(0)};
    CHECK(primitive_successor_power(s, st, winners) == std::vector<double>{1.0});
}

TEST_CASE("check_primitive_state") {
    const auto s = two_people();
    CHECK_NOTHROW(check_primitive_state(s, make_state(s, {1.0, 1.0}, {{0.5}, {0.9}}, {0})));
    CHECK_THROWS_AS(check_primitive_state(s, make_state(s, {1.0, 1.0}, {{1.0}, {0.0}}, {0})), StateError);
    CHECK_THROWS_AS(check_primitive_state(s, make_state(s, {0.0, 1.0}, {{0.0}, {0.0}}, {0})), StateError);
    CHECK_THROWS_AS(check_primitive_state(s, make_state(s, {1.0, 1.0}, {{0.0}, {0.0}}, {2})), StateError);
}

TEST_CASE("primitive state JSON round trip") {
    const auto s = three_people(2);
    const auto st = make_state(s, {1.0, 1.5, 0.25}, {{0.2, 0.3}, {0.4, 0.1}, {0.1, 0.1}}, {0, 2});
    CHECK(primitive_state_from_json(primitive_state_to_json(st)) == st);
}
