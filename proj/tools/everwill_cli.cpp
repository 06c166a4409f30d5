// Command-line front end: run, validate, audit, stats.
//
// Exit codes: 0 success, 1 violations found, 2 usage or I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "everwill/errors.hpp"
#include "everwill/history.hpp"
#include "everwill/invariants.hpp"

namespace fs = std::filesystem;
using namespace everwill;

namespace {

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kUsage = 2;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("everwill");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("EVERWILL_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(level));
}

void print_config_errors(const ConfigError& e) {
    std::cerr << "config has " << e.errors().size() << " error(s):\n";
    for (const auto& err : e.errors()) std::cerr << "  - " << err << '\n';
}

int print_audit(const InvariantReport& report, std::ostream& out) {
    out << report.to_json().dump(2) << '\n';
    for (const auto& v : report.violations)
        std::cerr << fmt::format("violation [{}] at step {}: {}\n", v.check, v.step, v.detail);
    return report.ok() ? kOk : kViolations;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    RunConfig config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        print_config_errors(e);
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }

    RunResult result;
    try {
        result = run_history(config);
    } catch (const ConfigError& e) {
        print_config_errors(e);
        return kUsage;
    } catch (const StepError& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return kViolations;
    }

    fs::path log_path = config.log.path;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        log_path = fs::path(out_dir) / log_path.filename();
    }
    {
        std::ofstream out(log_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write log '" << log_path.string() << "'\n";
            return kUsage;
        }
        result.log.write(out);
    }
    spdlog::info("wrote {} steps to {}", result.log.steps.size(), log_path.string());
    std::cout << fmt::format("{} run: {} steps, seed {}, log {}\n", to_string(config.model), config.steps, config.seed,
                             log_path.string());
    if (!result.metrics.total_power.empty())
        std::cout << fmt::format("total power: {} -> {}\n", result.metrics.total_power.front(),
                                 result.metrics.total_power.back());
    if (result.metrics.reciprocity) {
        const auto& r = *result.metrics.reciprocity;
        std::cout << fmt::format("reciprocity: {} exercises, {} reciprocated (latency {}..{}), {} pending\n", r.events,
                                 r.resolved, r.min, r.max, r.pending);
    }

    if (config.audit) {
        const auto report = check_invariants(result.log);
        fs::path audit_path = log_path;
        audit_path.replace_extension(".audit.json");
        std::ofstream out(audit_path);
        out << report.to_json().dump(2) << '\n';
        std::cout << fmt::format("audit: {} ({} violations) -> {}\n", report.ok() ? "pass" : "FAIL",
                                 report.violations.size(), audit_path.string());
        for (const auto& v : report.violations)
            std::cerr << fmt::format("violation [{}] at step {}: {}\n", v.check, v.step, v.detail);
        if (!report.ok()) return kViolations;
    }
    return kOk;
}

int cmd_validate(const std::string& config_path) {
    try {
        const auto config = load_config(config_path);
        prepare_run(config);
        std::cout << fmt::format("{}: ok ({} model, strategy {}, {} steps)\n", config_path, to_string(config.model),
                                 config.strategy.name, config.steps);
        return kOk;
    } catch (const ConfigError& e) {
        print_config_errors(e);
        return kViolations;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}

int cmd_audit(const std::string& log_path, const std::string& report_path) {
    try {
        const auto log = read_history_file(log_path);
        const auto report = check_invariants(log);
        if (report_path.empty()) return print_audit(report, std::cout);
        std::ofstream out(report_path);
        if (!out) {
            std::cerr << "error: cannot write report '" << report_path << "'\n";
            return kUsage;
        }
        return print_audit(report, out);
    } catch (const SnapshotGapError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}

int cmd_stats(const std::string& log_path, const std::string& format) {
    try {
        const auto log = read_history_file(log_path);
        if (!log.footer) {
            std::cerr << "error: log has no footer (run was interrupted?)\n";
            return kUsage;
        }
        const auto metrics = MetricsReport::from_json(log.footer->at("metrics"));
        if (format == "csv") {
            std::cout << metrics.to_csv();
        } else {
            nlohmann::json rows = nlohmann::json::array();
            for (std::size_t t = 0; t < metrics.ownership.size(); ++t)
                rows.push_back({{"t", t},
                                {"total_power", metrics.total_power[t]},
                                {"gini", metrics.gini[t]},
                                {"owned", metrics.ownership[t]}});
            nlohmann::json doc = {{"format_version", kFormatVersion}, {"rows", rows}};
            if (metrics.reciprocity) doc["reciprocity"] = metrics.to_json().at("reciprocity");
            std::cout << doc.dump(2) << '\n';
        }
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Simulate and audit everlasting-society histories"};
    app.require_subcommand(1);

    std::string config_path, out_dir, log_path, report_path, format = "json";

    auto* run = app.add_subcommand("run", "Run a history and write its JSONL log");
    run->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Directory for the log (default: log.path from the config)");

    auto* validate = app.add_subcommand("validate", "Check a config and its initial state without running");
    validate->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);

    auto* audit = app.add_subcommand("audit", "Check every invariant over a logged history");
    audit->add_option("--log", log_path, "History log (JSONL)")->required()->check(CLI::ExistingFile);
    audit->add_option("--report", report_path, "Write the JSON report here instead of stdout");

    auto* stats = app.add_subcommand("stats", "Per-step metrics of a logged history");
    stats->add_option("--log", log_path, "History log (JSONL)")->required()->check(CLI::ExistingFile);
    stats->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*run) return cmd_run(config_path, out_dir);
    if (*validate) return cmd_validate(config_path);
    if (*audit) return cmd_audit(log_path, report_path);
    return cmd_stats(log_path, format);
}
