#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "everwill/society.hpp"
#include "everwill/strategies.hpp"

namespace everwill {

inline constexpr int kFormatVersion = 1;

/// Every problem found in a config, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
    std::vector<std::string> errors_;
};

struct InlineSociety {
    nlohmann::json document;
    friend bool operator==(const InlineSociety&, const InlineSociety&) = default;
};

struct SocietyFile {
    std::string path;  ///< relative paths resolve against RunConfig::base_dir
    friend bool operator==(const SocietyFile&, const SocietyFile&) = default;
};

struct GeneratedSociety {
    std::size_t persons = 1;
    std::size_t estate = 1;
    std::uint64_t seed = 0;
    GeneratorParams params;
    friend bool operator==(const GeneratedSociety&, const GeneratedSociety&) = default;
};

using SocietySource = std::variant<InlineSociety, SocietyFile, GeneratedSociety>;

/// Optional explicit pieces of sigma_0; null members are generated.
/// Shapes per model:
///   assignment  [owner of good 0, owner of good 1, ...]            (all models)
///   power       number (uniform) | primitive: [pi(x)...] | good: [[x,a,y,v]...]
///   force       primitive: [[phi(x,a)...]...] | good: [[x,a,y,v]...]
///   carriers    golden roster [{"id","mu","theta"}...] | {"count", "mu", "theta": [...]}
///   locations   golden: [[x,a,y] per carrier]
///   idle        golden: [tau(c)...]
///   exercised   golden: [[c,x,a,y]...]
struct InitialSpec {
    nlohmann::json assignment;
    nlohmann::json power;
    nlohmann::json force;
    nlohmann::json carriers;
    nlohmann::json locations;
    nlohmann::json idle;
    nlohmann::json exercised;
    friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct LogOptions {
    std::size_t snapshot_interval = 1;
    std::string path = "history.jsonl";
    friend bool operator==(const LogOptions&, const LogOptions&) = default;
};

struct RunConfig {
    ModelKind model = ModelKind::Primitive;
    SocietySource society = GeneratedSociety{};
    InitialSpec initial;
    StrategySpec strategy;
    std::size_t steps = 1;
    std::uint64_t seed = 0;
    LogOptions log;
    bool audit = false;
    std::filesystem::path base_dir;  ///< not serialized

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates a config document. Throws ConfigError listing every
/// problem found.
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
/// Relative paths inside the file resolve against its directory.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const RunConfig& config);

/// Builds the society named by the config.
Society resolve_society(const RunConfig& config);

}  // namespace everwill
