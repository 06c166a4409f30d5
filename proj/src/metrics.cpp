#include "everwill/metrics.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace everwill {

double gini(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    double total = 0.0;
    for (double v : values) total += v;
    if (total <= 0.0) return 0.0;
    double diff = 0.0;
    for (double a : values)
        for (double b : values) diff += std::abs(a - b);
    return diff / (2.0 * static_cast<double>(values.size()) * total);
}

void MetricsReport::record(std::span<const PersonId> owners, std::size_t persons, double power) {
    std::vector<std::size_t> counts(persons, 0);
    for (PersonId p : owners) ++counts.at(p.value);
    if (cumulative_.size() != persons) cumulative_.assign(persons, 0.0);
    for (std::size_t x = 0; x < persons; ++x) cumulative_[x] += static_cast<double>(counts[x]);
    ownership.push_back(std::move(counts));
    total_power.push_back(power);
    gini.push_back(everwill::gini(cumulative_));
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json doc = {{"ownership", ownership}, {"total_power", total_power}, {"gini", gini}};
    if (reciprocity) {
        doc["reciprocity"] = {{"events", reciprocity->events}, {"resolved", reciprocity->resolved},
                              {"pending", reciprocity->pending}, {"min", reciprocity->min},
                              {"max", reciprocity->max},       {"mean", reciprocity->mean}};
    }
    return doc;
}

MetricsReport MetricsReport::from_json(const nlohmann::json& doc) {
    MetricsReport m;
    m.ownership = doc.at("ownership").get<std::vector<std::vector<std::size_t>>>();
    m.total_power = doc.at("total_power").get<std::vector<double>>();
    m.gini = doc.at("gini").get<std::vector<double>>();
    if (doc.contains("reciprocity")) {
        const auto& r = doc.at("reciprocity");
        m.reciprocity = LatencySummary{r.at("events").get<std::size_t>(), r.at("resolved").get<std::size_t>(),
                                       r.at("pending").get<std::size_t>(), r.at("min").get<std::size_t>(),
                                       r.at("max").get<std::size_t>(),     r.at("mean").get<double>()};
    }
    // Rebuild the running totals so a decoded report can keep recording.
    for (const auto& row : m.ownership) {
        if (m.cumulative_.size() != row.size()) m.cumulative_.assign(row.size(), 0.0);
        for (std::size_t x = 0; x < row.size(); ++x) m.cumulative_[x] += static_cast<double>(row[x]);
    }
    return m;
}

std::string MetricsReport::to_csv() const {
    std::ostringstream out;
    const std::size_t persons = ownership.empty() ? 0 : ownership.front().size();
    out << "t,total_power,gini";
    for (std::size_t x = 0; x < persons; ++x) out << ",owned_" << x;
    out << '\n';
    for (std::size_t t = 0; t < ownership.size(); ++t) {
        out << t << ',' << fmt::format("{}", total_power[t]) << ',' << fmt::format("{}", gini[t]);
        for (std::size_t count : ownership[t]) out << ',' << count;
        out << '\n';
    }
    return out.str();
}

}  // namespace everwill
