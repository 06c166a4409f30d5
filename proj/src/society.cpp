#include "everwill/society.hpp"

#include <cmath>
#include <stdexcept>

#include "everwill/errors.hpp"
#include "everwill/rng.hpp"

namespace everwill {

RelationshipTable RelationshipTable::from_rows(const std::vector<std::vector<double>>& rows) {
    RelationshipTable t;
    t.n_ = rows.size();
    t.values_.reserve(t.n_ * t.n_);
    for (std::size_t x = 0; x < rows.size(); ++x) {
        if (rows[x].size() != t.n_) {
            throw StructuralError("relationship table is not square: row " + std::to_string(x) +
                                  " has " + std::to_string(rows[x].size()) + " entries, expected " +
                                  std::to_string(t.n_));
        }
        for (std::size_t y = 0; y < t.n_; ++y) {
            if (!std::isfinite(rows[x][y])) {
                throw StructuralError("relationship table entry (" + std::to_string(x) + ", " +
                                      std::to_string(y) + ") is not finite");
            }
            t.values_.push_back(rows[x][y]);
        }
    }
    return t;
}

std::vector<std::vector<double>> RelationshipTable::rows() const {
    std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
    for (std::size_t x = 0; x < n_; ++x)
        for (std::size_t y = 0; y < n_; ++y) out[x][y] = (*this)(x, y);
    return out;
}

std::string to_string(Axiom axiom) {
    switch (axiom) {
        case Axiom::Diagonal: return "diagonal";
        case Axiom::OpenInterval: return "open-interval";
        case Axiom::Symmetry: return "symmetry";
        case Axiom::Triangle: return "triangle";
    }
    return "unknown";
}

ValidationReport validate_relationships(const RelationshipTable& t) {
    ValidationReport report;
    const std::size_t n = t.size();
    for (std::size_t x = 0; x < n; ++x) {
        const double d = std::abs(t(x, x) - 1.0);
        if (d > kAxiomTolerance) report.violations.push_back({Axiom::Diagonal, x, x, x, d});
    }
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            const double v = t(x, y);
            if (v <= 0.0) report.violations.push_back({Axiom::OpenInterval, x, y, y, -v});
            if (v >= 1.0) report.violations.push_back({Axiom::OpenInterval, x, y, y, v - 1.0});
            if (x < y) {
                const double d = std::abs(v - t(y, x));
                if (d > kAxiomTolerance) report.violations.push_back({Axiom::Symmetry, x, y, y, d});
            }
        }
    }
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            for (std::size_t z = 0; z < n; ++z) {
                const double excess = t(x, z) + t(z, y) - (1.0 + t(x, y));
                if (excess > kAxiomTolerance)
                    report.violations.push_back({Axiom::Triangle, x, y, z, excess});
            }
        }
    }
    return report;
}

ValidationReport validate_relationships(const std::vector<std::vector<double>>& rows) {
    return validate_relationships(RelationshipTable::from_rows(rows));
}

RelationshipTable generate_relationships(std::size_t n, std::uint64_t seed,
                                         const GeneratorParams& params) {
    if (n == 0) throw std::invalid_argument("generate_relationships: person count must be >= 1");
    if (params.dimension == 0) throw std::invalid_argument("generate_relationships: dimension must be >= 1");
    if (!(params.epsilon > 0.0 && params.epsilon < 0.5))
        throw std::invalid_argument("generate_relationships: epsilon must lie in (0, 0.5)");

    Rng rng(seed);
    std::vector<double> points(n * params.dimension);
    for (double& p : points) p = rng.uniform();

    // The box diagonal bounds every distance, so the squeeze below never
    // reaches 1 - epsilon except for antipodal corners.
    const double diameter = std::sqrt(static_cast<double>(params.dimension));
    const double span = 1.0 - 2.0 * params.epsilon;

    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 1.0));
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            double sq = 0.0;
            for (std::size_t k = 0; k < params.dimension; ++k) {
                const double d = points[x * params.dimension + k] - points[y * params.dimension + k];
                sq += d * d;
            }
            const double distance = params.epsilon + span * std::sqrt(sq) / diameter;
            rows[x][y] = rows[y][x] = 1.0 - distance;
        }
    }
    return RelationshipTable::from_rows(rows);
}

Society::Society(std::size_t persons, std::size_t estate, RelationshipTable relationships)
    : persons_(persons), estate_(estate), relationships_(std::move(relationships)) {
    if (persons_ == 0) throw std::invalid_argument("society needs at least one person");
    if (estate_ == 0) throw std::invalid_argument("society needs at least one good");
    if (relationships_.size() != persons_) {
        throw StructuralError("relationship table has dimension " +
                              std::to_string(relationships_.size()) + " but society has " +
                              std::to_string(persons_) + " persons");
    }
    const auto report = validate_relationships(relationships_);
    if (!report.ok()) {
        const auto& v = report.violations.front();
        throw std::invalid_argument("relationship table violates the " + to_string(v.axiom) +
                                    " axiom at (" + std::to_string(v.x) + ", " +
                                    std::to_string(v.y) + ", " + std::to_string(v.z) + ")");
    }
}

double Society::relationship(PersonId x, PersonId y) const {
    if (x.value >= persons_ || y.value >= persons_)
        throw std::out_of_range("relationship: person id out of range");
    return relationships_(x.value, y.value);
}

SocialAssignment round_robin_assignment(const Society& society) {
    SocialAssignment alpha;
    alpha.owner.reserve(society.good_count());
    for (std::size_t a = 0; a < society.good_count(); ++a)
        alpha.owner.emplace_back(a % society.person_count());
    return alpha;
}

void check_assignment(const Society& society, const SocialAssignment& assignment) {
    if (assignment.size() != society.good_count())
        throw StateError("assignment covers " + std::to_string(assignment.size()) + " goods, estate has " +
                         std::to_string(society.good_count()));
    for (std::size_t a = 0; a < assignment.size(); ++a) {
        if (assignment.owner[a].value >= society.person_count())
            throw StateError("good " + std::to_string(a) + " is owned by unknown person " +
                             std::to_string(assignment.owner[a].value));
    }
}

nlohmann::json society_to_json(const Society& society) {
    return {{"persons", society.person_count()},
            {"estate", society.good_count()},
            {"relationships", society.relationships().rows()}};
}

Society society_from_json(const nlohmann::json& doc) {
    try {
        const auto persons = doc.at("persons").get<std::size_t>();
        const auto estate = doc.at("estate").get<std::size_t>();
        auto rows = doc.at("relationships").get<std::vector<std::vector<double>>>();
        return Society(persons, estate, RelationshipTable::from_rows(rows));
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("malformed society document: ") + e.what());
    }
}

nlohmann::json assignment_to_json(const SocialAssignment& assignment) {
    auto out = nlohmann::json::array();
    for (auto p : assignment.owner) out.push_back(p.value);
    return out;
}

SocialAssignment assignment_from_json(const nlohmann::json& doc) {
    SocialAssignment alpha;
    for (const auto& v : doc) alpha.owner.emplace_back(v.get<std::size_t>());
    return alpha;
}

}  // namespace everwill
