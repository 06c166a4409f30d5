#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "everwill/ids.hpp"

namespace everwill {

/// Gini coefficient of non-negative values; 0 for an all-zero or single entry.
double gini(std::span<const double> values);

struct LatencySummary {
    std::size_t events = 0;
    std::size_t resolved = 0;
    std::size_t pending = 0;
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
    friend bool operator==(const LatencySummary&, const LatencySummary&) = default;
};

/// Per-state series, index t = state sigma_t.
struct MetricsReport {
    std::vector<std::vector<std::size_t>> ownership;  ///< goods owned per person
    std::vector<double> total_power;                  ///< sum of pi (golden: sum of mu held)
    std::vector<double> gini;                         ///< over cumulative goods-owned
    std::optional<LatencySummary> reciprocity;        ///< golden only

    /// Appends one state's observations.
    void record(std::span<const PersonId> owners, std::size_t persons, double total_power);

    nlohmann::json to_json() const;
    static MetricsReport from_json(const nlohmann::json& doc);

    /// Header then one row per state: t,total_power,gini,owned_0,...,owned_{n-1}
    std::string to_csv() const;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;

private:
    std::vector<double> cumulative_;
};


}  // namespace everwill
