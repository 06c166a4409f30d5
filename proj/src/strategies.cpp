#include "everwill/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace everwill {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Primitive: return "primitive";
        case ModelKind::Good: return "good";
        case ModelKind::Golden: return "golden";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "primitive") return ModelKind::Primitive;
    if (text == "good") return ModelKind::Good;
    if (text == "golden") return ModelKind::Golden;
    throw std::invalid_argument("unknown model kind '" + std::string(text) + "'");
}

std::vector<std::string> strategy_names(ModelKind kind) {
    switch (kind) {
        case ModelKind::Primitive: return {"uniform-selfish", "proportional-greedy", "zero-force"};
        case ModelKind::Good: return {"selfish", "altruist", "mirror"};
        case ModelKind::Golden: return {"minimal-compliance", "greedy", "bernoulli"};
    }
    return {};
}

namespace {

/// Reads a numeric parameter, rejecting wrong types and out-of-range values.
double number_param(const StrategySpec& spec, const char* key, double fallback, double lo, double hi,
                    bool lo_open, bool hi_open) {
    if (!spec.params.contains(key)) return fallback;
    const auto& v = spec.params.at(key);
    if (!v.is_number()) throw StrategyConfigError(spec.name + ": parameter '" + key + "' must be a number");
    const double x = v.get<double>();
    const bool below = lo_open ? !(x > lo) : !(x >= lo);
    const bool above = hi_open ? !(x < hi) : !(x <= hi);
    if (!std::isfinite(x) || below || above) {
        throw StrategyConfigError(spec.name + ": parameter '" + key + "' must lie in " + (lo_open ? "(" : "[") +
                                  std::to_string(lo) + ", " + std::to_string(hi) + (hi_open ? ")" : "]"));
    }
    return x;
}

void only_keys(const StrategySpec& spec, std::set<std::string> allowed) {
    if (spec.params.is_null()) return;
    if (!spec.params.is_object()) throw StrategyConfigError(spec.name + ": params must be a JSON object");
    for (const auto& [key, _] : spec.params.items())
        if (!allowed.contains(key)) throw StrategyConfigError(spec.name + ": unknown parameter '" + key + "'");
}

[[noreturn]] void unknown(ModelKind kind, const std::string& name) {
    std::string known;
    for (const auto& n : strategy_names(kind)) known += (known.empty() ? "" : ", ") + n;
    throw StrategyConfigError("unknown " + to_string(kind) + " strategy '" + name + "' (known: " + known + ")");
}

double beta_of(const StrategySpec& s) { return number_param(s, "beta", 0.5, 0.0, 1.0, false, true); }
double gamma_of(const StrategySpec& s) { return number_param(s, "gamma", 0.9, 0.0, 1.0, true, true); }
double epsilon_of(const StrategySpec& s) { return number_param(s, "epsilon", 1e-9, 0.0, 1.0, true, true); }
double p_of(const StrategySpec& s) { return number_param(s, "p", 0.5, 0.0, 1.0, false, false); }

}  // namespace

std::unique_ptr<PrimitiveStrategy> make_primitive_strategy(const StrategySpec& spec) {
    if (spec.name == "uniform-selfish") {
        only_keys(spec, {"beta"});
        return std::make_unique<UniformSelfish>(beta_of(spec));
    }
    if (spec.name == "proportional-greedy") {
        only_keys(spec, {"beta"});
        return std::make_unique<ProportionalGreedy>(beta_of(spec));
    }
    if (spec.name == "zero-force") {
        only_keys(spec, {});
        return std::make_unique<ZeroForce>();
    }
    unknown(ModelKind::Primitive, spec.name);
}

std::unique_ptr<GoodStrategy> make_good_strategy(const StrategySpec& spec) {
    if (spec.name == "selfish" || spec.name == "altruist" || spec.name == "mirror") {
        only_keys(spec, {"gamma", "epsilon"});
        const double gamma = gamma_of(spec);
        const double epsilon = epsilon_of(spec);
        if (spec.name == "selfish") return std::make_unique<Selfish>(gamma, epsilon);
        if (spec.name == "altruist") return std::make_unique<Altruist>(gamma, epsilon);
        return std::make_unique<Mirror>(gamma, epsilon);
    }
    unknown(ModelKind::Good, spec.name);
}

std::unique_ptr<GoldenStrategy> make_golden_strategy(const StrategySpec& spec) {
    if (spec.name == "minimal-compliance") {
        only_keys(spec, {});
        return std::make_unique<MinimalCompliance>();
    }
    if (spec.name == "greedy") {
        only_keys(spec, {});
        return std::make_unique<Greedy>();
    }
    if (spec.name == "bernoulli") {
        only_keys(spec, {"p"});
        return std::make_unique<Bernoulli>(p_of(spec));
    }
    unknown(ModelKind::Golden, spec.name);
}

void check_strategy_spec(ModelKind kind, const StrategySpec& spec) {
    switch (kind) {
        case ModelKind::Primitive: make_primitive_strategy(spec); break;
        case ModelKind::Good: make_good_strategy(spec); break;
        case ModelKind::Golden: make_golden_strategy(spec); break;
    }
}

UniformSelfish::UniformSelfish(double beta) : beta_(beta) {
    if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("uniform-selfish: beta must lie in [0, 1)");
}

PrimitiveForceTable UniformSelfish::propose(const PrimitiveContext& ctx) {
    const std::size_t goods = ctx.society.good_count();
    PrimitiveForceTable force(ctx.society.person_count(), goods);
    for (std::size_t x = 0; x < force.persons(); ++x)
        for (std::size_t a = 0; a < goods; ++a)
            force(PersonId(x), GoodId(a)) = beta_ * ctx.power[x] / static_cast<double>(goods);
    return force;
}

ProportionalGreedy::ProportionalGreedy(double beta) : beta_(beta) {
    if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("proportional-greedy: beta must lie in [0, 1)");
}

PrimitiveForceTable ProportionalGreedy::propose(const PrimitiveContext& ctx) {
    const std::size_t goods = ctx.society.good_count();
    PrimitiveForceTable force(ctx.society.person_count(), goods);
    for (std::size_t x = 0; x < force.persons(); ++x) {
        const PersonId px(x);
        double weight_total = 0.0;
        for (std::size_t a = 0; a < goods; ++a)
            weight_total += ctx.society.relationship(px, ctx.assignment[GoodId(a)]);
        for (std::size_t a = 0; a < goods; ++a) {
            const double w = ctx.society.relationship(px, ctx.assignment[GoodId(a)]);
            force(px, GoodId(a)) = beta_ * ctx.power[x] * w / weight_total;
        }
    }
    return force;
}

PrimitiveForceTable ZeroForce::propose(const PrimitiveContext& ctx) {
    return PrimitiveForceTable(ctx.society.person_count(), ctx.society.good_count(), 0.0);
}

double interior_force(double desired, double cap, double epsilon) {
    const double floor = std::min(epsilon, 0.5 * cap);
    return std::clamp(desired, floor, std::nextafter(cap, 0.0));
}

namespace {

void check_gamma_epsilon(const char* who, double gamma, double epsilon) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument(std::string(who) + ": gamma must lie in (0, 1)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument(std::string(who) + ": epsilon must lie in (0, 1)");
}

double cap_at(const GoodPowerTable& power, std::size_t x, std::size_t a, std::size_t y) {
    return std::min(power(PersonId(x), GoodId(a), PersonId(y)), 1.0);
}

}  // namespace

Selfish::Selfish(double gamma, double epsilon) : gamma_(gamma), epsilon_(epsilon) {
    check_gamma_epsilon("selfish", gamma, epsilon);
}

GoodForceTable Selfish::propose(const GoodContext& ctx) {
    const std::size_t n = ctx.society.person_count();
    const std::size_t m = ctx.society.good_count();
    GoodForceTable force(n, m);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t y = 0; y < n; ++y) {
                const double cap = cap_at(ctx.power, x, a, y);
                const double desired = x == y ? gamma_ * cap : epsilon_;
                force(PersonId(x), GoodId(a), PersonId(y)) = interior_force(desired, cap, epsilon_);
            }
    return force;
}

Altruist::Altruist(double gamma, double epsilon) : gamma_(gamma), epsilon_(epsilon) {
    check_gamma_epsilon("altruist", gamma, epsilon);
}

GoodForceTable Altruist::propose(const GoodContext& ctx) {
    const std::size_t n = ctx.society.person_count();
    const std::size_t m = ctx.society.good_count();
    GoodForceTable force(n, m);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t y = 0; y < n; ++y) {
                const double cap = cap_at(ctx.power, x, a, y);
                const double desired = x == y ? epsilon_ : gamma_ * cap;
                force(PersonId(x), GoodId(a), PersonId(y)) = interior_force(desired, cap, epsilon_);
            }
    return force;
}

Mirror::Mirror(double gamma, double epsilon) : gamma_(gamma), epsilon_(epsilon) {
    check_gamma_epsilon("mirror", gamma, epsilon);
}

GoodForceTable Mirror::propose(const GoodContext& ctx) {
    const std::size_t n = ctx.society.person_count();
    const std::size_t m = ctx.society.good_count();
    GoodForceTable force(n, m);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < m; ++a) {
            const PersonId px(x);
            const GoodId ga(a);
            double strongest = 0.0;
            if (ctx.previous_force)
                for (std::size_t z = 0; z < n; ++z) strongest = std::max(strongest, (*ctx.previous_force)(PersonId(z), ga, px));
            for (std::size_t y = 0; y < n; ++y) {
                const double weight =
                    ctx.previous_force && strongest > 0.0 ? (*ctx.previous_force)(PersonId(y), ga, px) / strongest : 1.0;
                const double cap = cap_at(ctx.power, x, a, y);
                force(px, ga, PersonId(y)) = interior_force(gamma_ * cap * weight, cap, epsilon_);
            }
        }
    return force;
}

GoldenForceSelection MinimalCompliance::propose(const GoldenContext& ctx) {
    GoldenForceSelection selection(ctx.roster.size());
    for (std::size_t c = 0; c < ctx.roster.size(); ++c)
        if (ctx.mandatory(CarrierId(c))) selection.exercise(CarrierId(c), ctx.partition[CarrierId(c)]);
    return selection;
}

GoldenForceSelection Greedy::propose(const GoldenContext& ctx) {
    GoldenForceSelection selection(ctx.roster.size());
    for (std::size_t c = 0; c < ctx.roster.size(); ++c) selection.exercise(CarrierId(c), ctx.partition[CarrierId(c)]);
    return selection;
}

Bernoulli::Bernoulli(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p must lie in [0, 1]");
}

GoldenForceSelection Bernoulli::propose(const GoldenContext& ctx) {
    GoldenForceSelection selection(ctx.roster.size());
    for (std::size_t c = 0; c < ctx.roster.size(); ++c) {
        const CarrierId id(c);
        if (ctx.mandatory(id) || ctx.rng.uniform() < p_) selection.exercise(id, ctx.partition[id]);
    }
    return selection;
}

}  // namespace everwill
