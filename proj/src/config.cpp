#include "everwill/config.hpp"

#include <fstream>
#include <sstream>

#include "everwill/errors.hpp"

namespace everwill {

namespace {

std::string join(const std::vector<std::string>& errors) {
    std::string out = "invalid config:";
    for (const auto& e : errors) out += "\n  - " + e;
    return out;
}

/// Collects errors while walking a document.
class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    void error(std::string message) { errors_.push_back(std::move(message)); }

    template <typename T>
    std::optional<T> get(const nlohmann::json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) return std::nullopt;
        try {
            return obj.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            error(where + key + ": wrong type");
            return std::nullopt;
        }
    }

    std::optional<std::size_t> positive(const nlohmann::json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() <= 0) {
            error(where + key + ": must be a positive integer");
            return std::nullopt;
        }
        return v.get<std::size_t>();
    }

private:
    std::vector<std::string>& errors_;
};

void unknown_keys(Reader& r, const nlohmann::json& obj, std::initializer_list<const char*> known,
                  const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) r.error(where + key + ": unknown field");
    }
}

SocietySource read_society(Reader& r, const nlohmann::json& doc, std::uint64_t run_seed,
                           const std::filesystem::path& base_dir) {
    if (!doc.is_object() || doc.size() != 1) {
        r.error("society: must be an object with exactly one of 'inline', 'file', 'generate'");
        return GeneratedSociety{};
    }
    if (doc.contains("inline")) {
        try {
            society_from_json(doc.at("inline"));
        } catch (const std::exception& e) {
            r.error(std::string("society.inline: ") + e.what());
        }
        return InlineSociety{doc.at("inline")};
    }
    if (doc.contains("file")) {
        SocietyFile file;
        if (auto p = r.get<std::string>(doc, "file", "society.")) file.path = *p;
        std::filesystem::path full = file.path;
        if (full.is_relative()) full = base_dir / full;
        if (!std::filesystem::exists(full)) r.error("society.file: '" + full.string() + "' does not exist");
        return file;
    }
    if (doc.contains("generate")) {
        const auto& g = doc.at("generate");
        GeneratedSociety gen;
        if (!g.is_object()) {
            r.error("society.generate: must be an object");
            return gen;
        }
        unknown_keys(r, g, {"persons", "estate", "seed", "epsilon", "dimension"}, "society.generate.");
        if (auto n = r.positive(g, "persons", "society.generate.")) gen.persons = *n;
        else if (!g.contains("persons")) r.error("society.generate.persons: required");
        if (auto m = r.positive(g, "estate", "society.generate.")) gen.estate = *m;
        else if (!g.contains("estate")) r.error("society.generate.estate: required");
        gen.seed = r.get<std::uint64_t>(g, "seed", "society.generate.").value_or(derive_stream_seed(run_seed, "society"));
        if (auto eps = r.get<double>(g, "epsilon", "society.generate.")) {
            if (!(*eps > 0.0 && *eps < 0.5)) r.error("society.generate.epsilon: must lie in (0, 0.5)");
            gen.params.epsilon = *eps;
        }
        if (auto d = r.positive(g, "dimension", "society.generate.")) gen.params.dimension = *d;
        return gen;
    }
    r.error("society: must contain one of 'inline', 'file', 'generate'");
    return GeneratedSociety{};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors) : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    std::vector<std::string> errors;
    Reader r(errors);
    RunConfig config;
    config.base_dir = base_dir;

    if (!doc.is_object()) throw ConfigError({"config must be a JSON object"});
    unknown_keys(r, doc, {"format_version", "model", "society", "initial", "strategy", "steps", "seed", "log", "audit"}, "");

    if (auto v = r.get<int>(doc, "format_version", ""); v && *v != kFormatVersion)
        r.error("format_version: unsupported version " + std::to_string(*v));

    if (auto model = r.get<std::string>(doc, "model", "")) {
        try {
            config.model = parse_model_kind(*model);
        } catch (const std::invalid_argument& e) {
            r.error(std::string("model: ") + e.what());
        }
    } else if (!doc.contains("model")) {
        r.error("model: required");
    }

    if (doc.contains("steps")) {
        if (auto s = r.positive(doc, "steps", "")) config.steps = *s;
    } else {
        r.error("steps: required");
    }
    if (doc.contains("seed")) {
        const auto& s = doc.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            r.error("seed: must be a non-negative 64-bit integer");
        else
            config.seed = s.get<std::uint64_t>();
    } else {
        r.error("seed: required");
    }

    if (doc.contains("society"))
        config.society = read_society(r, doc.at("society"), config.seed, base_dir);
    else
        r.error("society: required");

    if (doc.contains("strategy")) {
        const auto& s = doc.at("strategy");
        if (!s.is_object()) {
            r.error("strategy: must be an object");
        } else {
            unknown_keys(r, s, {"name", "params"}, "strategy.");
            if (auto name = r.get<std::string>(s, "name", "strategy.")) config.strategy.name = *name;
            else r.error("strategy.name: required");
            if (s.contains("params")) config.strategy.params = s.at("params");
            if (!config.strategy.name.empty()) {
                try {
                    check_strategy_spec(config.model, config.strategy);
                } catch (const std::invalid_argument& e) {
                    r.error(std::string("strategy: ") + e.what());
                }
            }
        }
    } else {
        r.error("strategy: required");
    }

    if (doc.contains("initial")) {
        const auto& init = doc.at("initial");
        if (!init.is_object()) {
            r.error("initial: must be an object");
        } else {
            unknown_keys(r, init, {"assignment", "power", "force", "carriers", "locations", "idle", "exercised"}, "initial.");
            auto field = [&](const char* key) { return init.contains(key) ? init.at(key) : nlohmann::json(); };
            config.initial = {field("assignment"), field("power"),     field("force"),    field("carriers"),
                              field("locations"),  field("idle"),      field("exercised")};
        }
    }
    const bool golden_fields = !config.initial.carriers.is_null() || !config.initial.locations.is_null() ||
                               !config.initial.idle.is_null() || !config.initial.exercised.is_null();
    if (config.model == ModelKind::Golden && config.initial.carriers.is_null())
        r.error("initial.carriers: required for golden runs");
    if (config.model != ModelKind::Golden && golden_fields)
        r.error("initial: carriers/locations/idle/exercised only apply to golden runs");
    if (config.model == ModelKind::Golden && (!config.initial.power.is_null() || !config.initial.force.is_null()))
        r.error("initial: power/force do not apply to golden runs (use carriers/locations/exercised)");

    if (doc.contains("log")) {
        const auto& l = doc.at("log");
        if (!l.is_object()) {
            r.error("log: must be an object");
        } else {
            unknown_keys(r, l, {"snapshot_interval", "path"}, "log.");
            if (l.contains("snapshot_interval")) {
                if (auto k = r.positive(l, "snapshot_interval", "log.")) config.log.snapshot_interval = *k;
            }
            if (auto p = r.get<std::string>(l, "path", "log.")) config.log.path = *p;
        }
    }
    if (auto a = r.get<bool>(doc, "audit", "")) config.audit = *a;
    if (config.audit && config.log.snapshot_interval != 1)
        r.error("log.snapshot_interval: audit requires snapshots at every step (interval 1)");

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return config;
}

RunConfig load_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    return config_from_json(doc, base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_config_text(buffer.str(), path.parent_path());
}

nlohmann::json config_to_json(const RunConfig& config) {
    nlohmann::json society;
    if (const auto* i = std::get_if<InlineSociety>(&config.society)) {
        society = {{"inline", i->document}};
    } else if (const auto* f = std::get_if<SocietyFile>(&config.society)) {
        society = {{"file", f->path}};
    } else {
        const auto& g = std::get<GeneratedSociety>(config.society);
        society = {{"generate",
                    {{"persons", g.persons},
                     {"estate", g.estate},
                     {"seed", g.seed},
                     {"epsilon", g.params.epsilon},
                     {"dimension", g.params.dimension}}}};
    }
    nlohmann::json initial = nlohmann::json::object();
    auto put = [&](const char* key, const nlohmann::json& v) {
        if (!v.is_null()) initial[key] = v;
    };
    put("assignment", config.initial.assignment);
    put("power", config.initial.power);
    put("force", config.initial.force);
    put("carriers", config.initial.carriers);
    put("locations", config.initial.locations);
    put("idle", config.initial.idle);
    put("exercised", config.initial.exercised);

    return {{"format_version", kFormatVersion},
            {"model", to_string(config.model)},
            {"society", society},
            {"initial", initial},
            {"strategy", {{"name", config.strategy.name}, {"params", config.strategy.params}}},
            {"steps", config.steps},
            {"seed", config.seed},
            {"log", {{"snapshot_interval", config.log.snapshot_interval}, {"path", config.log.path}}},
            {"audit", config.audit}};
}

Society resolve_society(const RunConfig& config) {
    if (const auto* i = std::get_if<InlineSociety>(&config.society)) return society_from_json(i->document);
    if (const auto* f = std::get_if<SocietyFile>(&config.society)) {
        std::filesystem::path full = f->path;
        if (full.is_relative()) full = config.base_dir / full;
        std::ifstream in(full);
        if (!in) throw std::runtime_error("cannot read society file '" + full.string() + "'");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw StructuralError("society file '" + full.string() + "' is not valid JSON: " + e.what());
        }
        return society_from_json(doc);
    }
    const auto& g = std::get<GeneratedSociety>(config.society);
    return Society(g.persons, g.estate, generate_relationships(g.persons, g.seed, g.params));
}

}  // namespace everwill
