#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "everwill/golden.hpp"
#include "everwill/good.hpp"
#include "everwill/primitive.hpp"

namespace everwill {

enum class ModelKind { Primitive, Good, Golden };

std::string to_string(ModelKind kind);
/// Throws std::invalid_argument for anything but "primitive", "good", "golden".
ModelKind parse_model_kind(std::string_view text);

/// Unknown strategy name or bad parameter object.
class StrategyConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Strategy selection as it appears in a run config.
struct StrategySpec {
    std::string name;
    nlohmann::json params = nlohmann::json::object();

    friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

/// Names accepted by the factories for a model kind.
std::vector<std::string> strategy_names(ModelKind kind);

std::unique_ptr<PrimitiveStrategy> make_primitive_strategy(const StrategySpec& spec);
std::unique_ptr<GoodStrategy> make_good_strategy(const StrategySpec& spec);
std::unique_ptr<GoldenStrategy> make_golden_strategy(const StrategySpec& spec);

/// Throws StrategyConfigError if the spec is not valid for the kind.
void check_strategy_spec(ModelKind kind, const StrategySpec& spec);

// Built-ins. Defaults: beta = 0.5, gamma = 0.9, epsilon = 1e-9, p = 0.5.

/// Each person spends beta * pi(x) spread evenly over the estate.
class UniformSelfish final : public PrimitiveStrategy {
public:
    explicit UniformSelfish(double beta = 0.5);
    std::string name() const override { return "uniform-selfish"; }
    PrimitiveForceTable propose(const PrimitiveContext& ctx) override;

private:
    double beta_;
};

/// Each person spends beta * pi(x), weighting good a by rho(x, alpha(a)).
class ProportionalGreedy final : public PrimitiveStrategy {
public:
    explicit ProportionalGreedy(double beta = 0.5);
    std::string name() const override { return "proportional-greedy"; }
    PrimitiveForceTable propose(const PrimitiveContext& ctx) override;

private:
    double beta_;
};

/// Nobody desires anything.
class ZeroForce final : public PrimitiveStrategy {
public:
    std::string name() const override { return "zero-force"; }
    PrimitiveForceTable propose(const PrimitiveContext& ctx) override;
};

/// Clamp a desired good force into (0, cap): never below min(epsilon, cap/2),
/// always strictly under cap.
double interior_force(double desired, double cap, double epsilon);

/// gamma * min(pi(x,a,x), 1) on the diagonal, epsilon elsewhere.
class Selfish final : public GoodStrategy {
public:
    Selfish(double gamma = 0.9, double epsilon = 1e-9);
    std::string name() const override { return "selfish"; }
    GoodForceTable propose(const GoodContext& ctx) override;

private:
    double gamma_;
    double epsilon_;
};

/// epsilon on the diagonal, gamma * min(pi(x,a,y), 1) for every y != x.
class Altruist final : public GoodStrategy {
public:
    Altruist(double gamma = 0.9, double epsilon = 1e-9);
    std::string name() const override { return "altruist"; }
    GoodForceTable propose(const GoodContext& ctx) override;

private:
    double gamma_;
    double epsilon_;
};

/// phi(x,a,y) = gamma * min(pi(x,a,y), 1) * phi_prev(y,a,x) / max_z phi_prev(z,a,x):
/// x answers y in proportion to what y last directed at x. Without a previous
/// table every weight is 1.
class Mirror final : public GoodStrategy {
public:
    Mirror(double gamma = 0.9, double epsilon = 1e-9);
    std::string name() const override { return "mirror"; }
    GoodForceTable propose(const GoodContext& ctx) override;

private:
    double gamma_;
    double epsilon_;
};

/// Exercise exactly the carriers whose idle count reached theta.
class MinimalCompliance final : public GoldenStrategy {
public:
    std::string name() const override { return "minimal-compliance"; }
    GoldenForceSelection propose(const GoldenContext& ctx) override;
};

/// Exercise every carrier every step.
class Greedy final : public GoldenStrategy {
public:
    std::string name() const override { return "greedy"; }
    GoldenForceSelection propose(const GoldenContext& ctx) override;
};

/// Mandatory carriers plus each other carrier with probability p, one draw
/// per non-mandatory carrier in ascending id order.
class Bernoulli final : public GoldenStrategy {
public:
    explicit Bernoulli(double p = 0.5);
    std::string name() const override { return "bernoulli"; }
    GoldenForceSelection propose(const GoldenContext& ctx) override;

private:
    double p_;
};

}  // namespace everwill
