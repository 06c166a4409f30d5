#include "everwill/history.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "everwill/errors.hpp"
#include "everwill/reciprocity.hpp"

namespace everwill {

namespace {

SocialAssignment initial_assignment(const Society& society, const nlohmann::json& spec,
                                    std::vector<std::string>& errors) {
    if (spec.is_null()) return round_robin_assignment(society);
    SocialAssignment alpha;
    try {
        alpha = assignment_from_json(spec);
        check_assignment(society, alpha);
    } catch (const std::exception& e) {
        errors.push_back(std::string("initial.assignment: ") + e.what());
        return round_robin_assignment(society);
    }
    return alpha;
}

PrimitiveState prepare_primitive(const RunConfig& config, const Society& society, std::vector<std::string>& errors) {
    PrimitiveState state;
    state.assignment = initial_assignment(society, config.initial.assignment, errors);
    const auto& power = config.initial.power;
    if (power.is_null()) {
        state.power.assign(society.person_count(), 1.0);
    } else if (power.is_number()) {
        state.power.assign(society.person_count(), power.get<double>());
    } else {
        try {
            state.power = power.get<std::vector<double>>();
        } catch (const nlohmann::json::exception&) {
            errors.push_back("initial.power: expected a number or one number per person");
            state.power.assign(society.person_count(), 1.0);
        }
    }
    if (!config.initial.force.is_null()) {
        try {
            nlohmann::json snapshot = {{"alpha", assignment_to_json(state.assignment)},
                                       {"power", state.power},
                                       {"force", config.initial.force}};
            state.force = primitive_state_from_json(snapshot).force;
        } catch (const std::exception& e) {
            errors.push_back(std::string("initial.force: ") + e.what());
        }
    } else if (errors.empty()) {
        auto strategy = make_primitive_strategy(config.strategy);
        Rng rng = make_stream(config.seed, "initial-state");
        PrimitiveContext ctx{society, state.assignment, state.power, nullptr, 0, rng};
        state.force = strategy->propose(ctx);
    }
    if (errors.empty()) {
        try {
            check_primitive_state(society, state);
        } catch (const std::exception& e) {
            errors.push_back(std::string("initial state: ") + e.what());
        }
    }
    return state;
}

GoodState prepare_good(const RunConfig& config, const Society& society, std::vector<std::string>& errors) {
    const std::size_t n = society.person_count();
    const std::size_t m = society.good_count();
    GoodState state;
    state.assignment = initial_assignment(society, config.initial.assignment, errors);
    const auto& power = config.initial.power;
    try {
        if (power.is_null())
            state.power = GoodPowerTable(n, m, 1.0);
        else if (power.is_number())
            state.power = GoodPowerTable(n, m, power.get<double>());
        else
            state.power = triple_table_from_json(n, m, power, 1.0);
    } catch (const std::exception& e) {
        errors.push_back(std::string("initial.power: ") + e.what());
        state.power = GoodPowerTable(n, m, 1.0);
    }
    if (!config.initial.force.is_null()) {
        try {
            state.force = triple_table_from_json(n, m, config.initial.force);
        } catch (const std::exception& e) {
            errors.push_back(std::string("initial.force: ") + e.what());
        }
    } else if (errors.empty()) {
        auto strategy = make_good_strategy(config.strategy);
        Rng rng = make_stream(config.seed, "initial-state");
        GoodContext ctx{society, state.assignment, state.power, nullptr, 0, rng};
        state.force = strategy->propose(ctx);
    }
    if (errors.empty()) {
        try {
            check_good_state(society, state);
        } catch (const std::exception& e) {
            errors.push_back(std::string("initial state: ") + e.what());
        }
    }
    return state;
}

CarrierRoster generated_roster(const nlohmann::json& spec) {
    const auto count = spec.at("count").get<std::size_t>();
    const double mu = spec.value("mu", 1.0);
    std::vector<std::size_t> thetas{1};
    if (spec.contains("theta")) {
        const auto& t = spec.at("theta");
        if (t.is_array()) {
            thetas.clear();
            for (const auto& v : t) {
                if (v.get<long long>() < 1) throw std::invalid_argument("theta values must be >= 1");
                thetas.push_back(v.get<std::size_t>());
            }
        } else {
            if (t.get<long long>() < 1) throw std::invalid_argument("theta must be >= 1");
            thetas = {t.get<std::size_t>()};
        }
        if (thetas.empty()) throw std::invalid_argument("theta list must be nonempty");
    }
    CarrierRoster roster;
    for (std::size_t c = 0; c < count; ++c) roster.push_back({CarrierId(c), mu, thetas[c % thetas.size()]});
    check_roster(roster);
    return roster;
}

GoldenState prepare_golden(const RunConfig& config, const Society& society, CarrierRoster& roster,
                           std::vector<std::string>& errors) {
    GoldenState state;
    state.assignment = initial_assignment(society, config.initial.assignment, errors);
    try {
        const auto& spec = config.initial.carriers;
        roster = spec.is_array() ? roster_from_json(spec) : generated_roster(spec);
    } catch (const std::exception& e) {
        errors.push_back(std::string("initial.carriers: ") + e.what());
        return state;
    }
    const std::size_t carriers = roster.size();
    Rng rng = make_stream(config.seed, "initial-state");
    auto draw = [&rng](std::size_t bound) {
        return std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(bound)), bound - 1);
    };

    std::vector<Location> locations(carriers);
    if (config.initial.locations.is_null()) {
        for (auto& loc : locations) {
            loc.from = PersonId(draw(society.person_count()));
            loc.good = GoodId(draw(society.good_count()));
            loc.to = PersonId(draw(society.person_count()));
        }
    } else {
        try {
            const auto& spec = config.initial.locations;
            if (spec.size() != carriers) throw std::invalid_argument("need one [x, a, y] per carrier");
            for (std::size_t c = 0; c < carriers; ++c) {
                const auto& cell = spec.at(c);
                locations[c] = {PersonId(cell.at(0).get<std::size_t>()), GoodId(cell.at(1).get<std::size_t>()),
                                PersonId(cell.at(2).get<std::size_t>())};
            }
        } catch (const std::exception& e) {
            errors.push_back(std::string("initial.locations: ") + e.what());
        }
    }
    state.partition = GoldenPowerPartition(std::move(locations));

    try {
        state.idle = config.initial.idle.is_null() ? IdleTable(carriers, 0) : config.initial.idle.get<IdleTable>();
    } catch (const std::exception& e) {
        errors.push_back(std::string("initial.idle: ") + e.what());
        state.idle.assign(carriers, 0);
    }

    if (!config.initial.exercised.is_null()) {
        try {
            state.selection = GoldenForceSelection(carriers);
            for (const auto& entry : config.initial.exercised) {
                const auto c = entry.at(0).get<std::size_t>();
                if (c >= carriers) throw std::invalid_argument("unknown carrier " + std::to_string(c));
                state.selection.exercise(CarrierId(c), {PersonId(entry.at(1).get<std::size_t>()),
                                                        GoodId(entry.at(2).get<std::size_t>()),
                                                        PersonId(entry.at(3).get<std::size_t>())});
            }
        } catch (const std::exception& e) {
            errors.push_back(std::string("initial.exercised: ") + e.what());
        }
    } else if (errors.empty() && state.idle.size() == carriers) {
        auto strategy = make_golden_strategy(config.strategy);
        GoldenContext ctx{society, roster, state.assignment, state.partition, state.idle, 0, rng};
        state.selection = strategy->propose(ctx);
    }
    if (errors.empty()) {
        for (const auto& issue : golden_state_issues(society, roster, state))
            errors.push_back("initial state: " + to_string(issue.defect) + ": " + issue.detail);
    }
    return state;
}

nlohmann::json state_to_json(const AnyState& state) {
    return std::visit(
        [](const auto& s) -> nlohmann::json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PrimitiveState>) return primitive_state_to_json(s);
            else if constexpr (std::is_same_v<T, GoodState>) return good_state_to_json(s);
            else return golden_state_to_json(s);
        },
        state);
}

AnyState state_from_json(ModelKind model, const Society& society, const nlohmann::json& doc) {
    switch (model) {
        case ModelKind::Primitive: return primitive_state_from_json(doc);
        case ModelKind::Good: return good_state_from_json(society.person_count(), society.good_count(), doc);
        case ModelKind::Golden: return golden_state_from_json(doc);
    }
    throw std::logic_error("unreachable model kind");
}

const SocialAssignment& assignment_of(const AnyState& state) {
    return std::visit([](const auto& s) -> const SocialAssignment& { return s.assignment; }, state);
}

double total_power(const AnyState& state, const CarrierRoster& roster) {
    if (const auto* p = std::get_if<PrimitiveState>(&state)) {
        double sum = 0.0;
        for (double v : p->power) sum += v;
        return sum;
    }
    if (const auto* g = std::get_if<GoodState>(&state)) return g->power.total();
    double sum = 0.0;
    for (const auto& c : roster) sum += c.intensity;
    return sum;
}

/// Golden per-step deltas: carriers that moved, the new force function, and idle resets.
void add_golden_deltas(nlohmann::json& record, const GoldenState& before, const GoldenState& after) {
    nlohmann::json moved = nlohmann::json::array();
    nlohmann::json reset = nlohmann::json::array();
    for (std::size_t c = 0; c < after.partition.carrier_count(); ++c) {
        const CarrierId id(c);
        if (after.partition[id] != before.partition[id]) {
            const Location& to = after.partition[id];
            moved.push_back({c, to.from.value, to.good.value, to.to.value});
        }
        if (after.idle[c] == 0) reset.push_back(c);
    }
    nlohmann::json exercised = nlohmann::json::array();
    for (CarrierId c : after.selection.exercised_carriers()) exercised.push_back(c.value);
    record["moved"] = moved;
    record["exercised"] = exercised;
    record["tau_reset"] = reset;
}

}  // namespace

PreparedRun prepare_run(const RunConfig& config) {
    std::vector<std::string> errors;
    std::optional<Society> society;
    try {
        society = resolve_society(config);
    } catch (const std::exception& e) {
        throw ConfigError({std::string("society: ") + e.what()});
    }
    CarrierRoster roster;
    AnyState initial;
    switch (config.model) {
        case ModelKind::Primitive: initial = prepare_primitive(config, *society, errors); break;
        case ModelKind::Good: initial = prepare_good(config, *society, errors); break;
        case ModelKind::Golden: initial = prepare_golden(config, *society, roster, errors); break;
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return {config, std::move(*society), std::move(roster), std::move(initial)};
}

void HistoryLog::write(std::ostream& out) const {
    out << header.dump() << '\n';
    for (const auto& record : steps) out << record.dump() << '\n';
    if (footer) out << footer->dump() << '\n';
}

std::string HistoryLog::to_string() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

HistoryLog read_history(std::istream& in) {
    HistoryLog log;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw StructuralError("log line " + std::to_string(line_no) + " is not JSON: " + e.what());
        }
        const auto kind = record.value("kind", std::string());
        if (kind == "header") {
            if (have_header) throw StructuralError("log has more than one header");
            if (record.value("format_version", 0) != kFormatVersion)
                throw StructuralError("unsupported log format_version");
            log.header = std::move(record);
            have_header = true;
        } else if (kind == "step") {
            if (!have_header) throw StructuralError("step record before header");
            if (log.footer) throw StructuralError("step record after footer");
            const auto t = record.value("t", std::size_t{0});
            if (t != log.steps.size() + 1)
                throw StructuralError("step indices are not contiguous at log line " + std::to_string(line_no));
            log.steps.push_back(std::move(record));
        } else if (kind == "footer") {
            log.footer = std::move(record);
        } else {
            throw StructuralError("log line " + std::to_string(line_no) + " has unknown kind '" + kind + "'");
        }
    }
    if (!have_header) throw StructuralError("log has no header");
    return log;
}

HistoryLog read_history_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read log file '" + path + "'");
    return read_history(in);
}

RunResult run_history(const PreparedRun& prepared, std::size_t steps) {
    const auto& config = prepared.config;
    const auto& society = prepared.society;
    const auto& roster = prepared.roster;
    spdlog::debug("run: model={} strategy={} steps={} seed={}", to_string(config.model), config.strategy.name, steps,
                  config.seed);

    RunResult result;
    result.log.header = {{"kind", "header"},
                         {"format_version", kFormatVersion},
                         {"engine_version", kEngineVersion},
                         {"model", to_string(config.model)},
                         {"seed", config.seed},
                         {"snapshot_interval", config.log.snapshot_interval},
                         {"config", config_to_json(config)},
                         {"society", society_to_json(society)},
                         {"initial", state_to_json(prepared.initial)}};
    if (config.model == ModelKind::Golden) result.log.header["carriers"] = roster_to_json(roster);

    auto streams = RunStreams::from_seed(config.seed);
    std::unique_ptr<PrimitiveStrategy> primitive;
    std::unique_ptr<GoodStrategy> good;
    std::unique_ptr<GoldenStrategy> golden;
    switch (config.model) {
        case ModelKind::Primitive: primitive = make_primitive_strategy(config.strategy); break;
        case ModelKind::Good: good = make_good_strategy(config.strategy); break;
        case ModelKind::Golden: golden = make_golden_strategy(config.strategy); break;
    }

    AnyState current = prepared.initial;
    std::vector<GoldenState> golden_history;
    if (config.model == ModelKind::Golden) golden_history.push_back(std::get<GoldenState>(current));
    result.metrics.record(assignment_of(current).owner, society.person_count(), total_power(current, roster));

    for (std::size_t t = 1; t <= steps; ++t) {
        nlohmann::json record;
        AnyState next;
        try {
            if (primitive) {
                auto out = primitive_step(society, std::get<PrimitiveState>(current), *primitive, streams, t);
                record = battles_to_json(out.record);
                next = std::move(out.state);
            } else if (good) {
                auto out = good_step(society, std::get<GoodState>(current), *good, streams, t);
                record = battles_to_json(out.record);
                next = std::move(out.state);
            } else {
                const auto& before = std::get<GoldenState>(current);
                auto out = golden_step(society, roster, before, *golden, streams, t);
                record = battles_to_json(out.record);
                add_golden_deltas(record, before, out.state);
                golden_history.push_back(out.state);
                next = std::move(out.state);
            }
        } catch (const std::exception& e) {
            throw StepError(t, e.what());
        }
        record["kind"] = "step";
        record["t"] = t;
        if (t % config.log.snapshot_interval == 0) record["snapshot"] = state_to_json(next);
        result.log.steps.push_back(std::move(record));
        current = std::move(next);
        result.metrics.record(assignment_of(current).owner, society.person_count(), total_power(current, roster));
    }

    if (config.model == ModelKind::Golden) {
        const auto audit = reciprocity_audit(society, roster, golden_history);
        LatencySummary summary{audit.events, audit.resolved, audit.pending, 0, 0, 0.0};
        double sum = 0.0;
        bool first = true;
        for (const auto& carrier : audit.per_carrier)
            for (const auto& [latency, count] : carrier.histogram) {
                summary.min = first ? latency : std::min(summary.min, latency);
                summary.max = std::max(summary.max, latency);
                sum += static_cast<double>(latency * count);
                first = false;
            }
        if (audit.resolved > 0) summary.mean = sum / static_cast<double>(audit.resolved);
        result.metrics.reciprocity = summary;
    }
    result.log.footer = nlohmann::json{{"kind", "footer"}, {"steps", steps}, {"metrics", result.metrics.to_json()}};
    spdlog::debug("run: finished {} steps", steps);
    return result;
}

RunResult run_history(const RunConfig& config) { return run_history(prepare_run(config), config.steps); }

DecodedHistory decode_history(const HistoryLog& log) {
    try {
        const auto model = parse_model_kind(log.header.at("model").get<std::string>());
        auto society = society_from_json(log.header.at("society"));
        CarrierRoster roster;
        if (model == ModelKind::Golden) roster = roster_from_json(log.header.at("carriers"));
        DecodedHistory history{model, std::move(society), std::move(roster), {}, {}};
        history.states.push_back(state_from_json(model, history.society, log.header.at("initial")));
        for (const auto& record : log.steps) {
            const auto t = record.at("t").get<std::size_t>();
            if (!record.contains("snapshot"))
                throw SnapshotGapError("step " + std::to_string(t) +
                                       " has no state snapshot; auditing requires a log written with "
                                       "snapshot interval 1");
            history.battles.push_back(battles_from_json(t, record));
            history.states.push_back(state_from_json(model, history.society, record.at("snapshot")));
        }
        return history;
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("malformed log: ") + e.what());
    }
}

}  // namespace everwill
