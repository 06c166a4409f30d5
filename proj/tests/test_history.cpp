#include <doctest.h>

#include <cmath>
#include <sstream>

#include "everwill/errors.hpp"
#include "everwill/history.hpp"
#include "everwill/invariants.hpp"

using namespace everwill;
using nlohmann::json;

namespace {

RunConfig primitive_config(std::size_t steps, std::uint64_t seed = 3) {
    return config_from_json(json{{"model", "primitive"},
                                 {"society", {{"generate", {{"persons", 5}, {"estate", 3}, {"seed", 42}}}}},
                                 {"strategy", {{"name", "uniform-selfish"}}},
                                 {"steps", steps == 0 ? 1 : steps},
                                 {"seed", seed}});
}

RunConfig golden_config(std::size_t steps, const std::string& strategy = "bernoulli") {
    return config_from_json(json{{"model", "golden"},
                                 {"society", {{"generate", {{"persons", 3}, {"estate", 2}, {"seed", 11}}}}},
                                 {"initial", {{"carriers", {{"count", 12}, {"mu", 1.0}, {"theta", {1, 2, 3}}}}}},
                                 {"strategy", {{"name", strategy}}},
                                 {"steps", steps},
                                 {"seed", 5}});
}

HistoryLog reparse(const HistoryLog& log) {
    std::istringstream in(log.to_string());
    return read_history(in);
}

}  // namespace

TEST_CASE("zero steps give the header-only prefix") {
    const auto prepared = prepare_run(primitive_config(0));
    const auto result = run_history(prepared, 0);
    CHECK(result.log.steps.empty());
    const auto& initial = std::get<PrimitiveState>(prepared.initial);
    CHECK(result.log.header.at("initial") == primitive_state_to_json(initial));
    const auto decoded = decode_history(reparse(result.log));
    REQUIRE(decoded.states.size() == 1);
    CHECK(std::get<PrimitiveState>(decoded.states[0]) == initial);
}

TEST_CASE("identical configs give byte-identical logs") {
    const auto a = run_history(primitive_config(200)).log.to_string();
    const auto b = run_history(primitive_config(200)).log.to_string();
    CHECK(a == b);
    CHECK(a != run_history(primitive_config(200, 4)).log.to_string());
    const auto g1 = run_history(golden_config(200)).log.to_string();
    CHECK(g1 == run_history(golden_config(200)).log.to_string());
}

TEST_CASE("primitive power is conserved along a logged history") {
    const auto result = run_history(primitive_config(1000));
    const auto decoded = decode_history(reparse(result.log));
    REQUIRE(decoded.states.size() == 1001);
    auto total = [](const AnyState& s) {
        double sum = 0.0;
        for (double p : std::get<PrimitiveState>(s).power) sum += p;
        return sum;
    };
    const double start = total(decoded.states.front());
    for (std::size_t t = 1; t < decoded.states.size(); ++t) {
        CHECK(std::abs(total(decoded.states[t]) - start) <= 1e-9);
        CHECK(std::abs(total(decoded.states[t]) - total(decoded.states[t - 1])) <= 1e-9);
    }
    CHECK(check_invariants(result.log).ok());
}

TEST_CASE("logged records line up with the decoded battles") {
    const auto result = run_history(golden_config(50));
    const auto decoded = decode_history(result.log);
    REQUIRE(decoded.battles.size() == 50);
    for (std::size_t t = 1; t <= 50; ++t) {
        CHECK(result.log.steps[t - 1].at("t") == t);
        CHECK(decoded.battles[t - 1].step == t);
        const auto& st = std::get<GoldenState>(decoded.states[t]);
        CHECK(st.assignment.owner == decoded.battles[t - 1].winners());
    }
}

TEST_CASE("a compliant golden run passes every invariant") {
    for (const auto* name : {"minimal-compliance", "greedy", "bernoulli"}) {
        const auto report = check_invariants(run_history(golden_config(300, name)).log);
        CHECK_MESSAGE(report.ok(), name);
        REQUIRE(report.reciprocity.has_value());
        CHECK(report.reciprocity->ok());
        REQUIRE(report.set_reciprocity.has_value());
        CHECK(report.set_reciprocity->ok());
    }
}

TEST_CASE("a corrupted idle counter is flagged at its step") {
    auto log = run_history(golden_config(100)).log;
    const std::size_t t = 37;
    auto& snapshot = log.steps[t - 1].at("snapshot");
    snapshot["tau"][4] = 4;  // carrier 4 has theta 2
    const auto report = check_invariants(log);
    CHECK_FALSE(report.ok());
    CHECK(report.first_violation("idle-bound") == std::optional<std::size_t>(t));
    CHECK(report.first_violation() == std::optional<std::size_t>(t));
}

TEST_CASE("perturbed primitive power is flagged at its step") {
    auto log = run_history(primitive_config(100)).log;
    auto& power = log.steps[59].at("snapshot").at("power");
    power[2] = power[2].get<double>() + 1e-6;
    const auto report = check_invariants(log);
    CHECK(report.first_violation("conservation") == std::optional<std::size_t>(60));
    CHECK(report.first_violation() == std::optional<std::size_t>(60));
    const auto replay = replay_history(log);
    REQUIRE_FALSE(replay.ok());
    CHECK(replay.mismatches.front() == 60);
}

TEST_CASE("invariants need a snapshot at every step") {
    auto config = primitive_config(20);
    config.log.snapshot_interval = 5;
    const auto log = run_history(config).log;
    CHECK(log.steps[4].contains("snapshot"));
    CHECK_FALSE(log.steps[0].contains("snapshot"));
    CHECK_THROWS_AS(check_invariants(log), SnapshotGapError);
}

TEST_CASE("replay reproduces every snapshot") {
    CHECK(replay_history(run_history(primitive_config(100)).log).ok());
    CHECK(replay_history(run_history(golden_config(100)).log).ok());
}

TEST_CASE("read_history rejects malformed logs") {
    const auto text = run_history(primitive_config(5)).log.to_string();
    {
        std::istringstream in(text.substr(text.find('\n') + 1));
        CHECK_THROWS_AS(read_history(in), StructuralError);
    }
    {
        auto log = run_history(primitive_config(5)).log;
        log.steps.erase(log.steps.begin() + 2);
        std::istringstream in(log.to_string());
        CHECK_THROWS_AS(read_history(in), StructuralError);
    }
    {
        std::istringstream in("{\"kind\": \"header\"\n");
        CHECK_THROWS_AS(read_history(in), StructuralError);
    }
    const auto roundtrip = reparse(run_history(primitive_config(5)).log);
    CHECK(roundtrip.to_string() == text);
}

TEST_CASE("metrics") {
    const auto result = run_history(primitive_config(300));
    const auto& m = result.metrics;
    REQUIRE(m.gini.size() == 301);
    for (std::size_t t = 0; t < m.gini.size(); ++t) {
        CHECK(m.gini[t] >= 0.0);
        CHECK(m.gini[t] <= 1.0);
        std::size_t owned = 0;
        for (auto k : m.ownership[t]) owned += k;
        CHECK(owned == 3);
    }
    const auto csv = m.to_csv();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 302);
    CHECK(csv.rfind("t,total_power,gini,owned_0", 0) == 0);
    CHECK(MetricsReport::from_json(m.to_json()) == m);
    REQUIRE(result.log.footer.has_value());
    CHECK(result.log.footer->at("steps") == 300);

    const std::vector<double> equal{1.0, 1.0, 1.0};
    const std::vector<double> one_has_all{0.0, 0.0, 3.0};
    CHECK(gini(equal) == 0.0);
    CHECK(gini(one_has_all) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("golden footer carries the reciprocity summary") {
    const auto result = run_history(golden_config(200));
    REQUIRE(result.metrics.reciprocity.has_value());
    const auto& r = *result.metrics.reciprocity;
    CHECK(r.events == r.resolved + r.pending);
    CHECK(r.min >= 1);
    CHECK(r.max <= 4);
}

TEST_CASE("bad configs fail before running") {
    auto config = primitive_config(5);
    config.initial.assignment = json::array({0, 9, 0});
    CHECK_THROWS_AS(prepare_run(config), ConfigError);
    config.initial.assignment = json::array({0, 1, 0});
    config.initial.power = json::array({1.0, 1.0, -1.0, 1.0, 1.0});
    CHECK_THROWS_AS(prepare_run(config), ConfigError);
}
