#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "everwill/ids.hpp"

namespace everwill {

/// Violations are reported only when they exceed this margin.
inline constexpr double kAxiomTolerance = 1e-12;

/// Symmetric |P|x|P| table of relationship strengths in (0, 1].
class RelationshipTable {
public:
    RelationshipTable() = default;

    /// Builds from nested rows. Throws StructuralError if the rows are not
    /// square or contain non-finite values. Does not check the axioms.
    static RelationshipTable from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t x, std::size_t y) const { return values_[x * n_ + y]; }
    std::vector<std::vector<double>> rows() const;

    friend bool operator==(const RelationshipTable&, const RelationshipTable&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

enum class Axiom { Diagonal, OpenInterval, Symmetry, Triangle };

std::string to_string(Axiom axiom);

struct AxiomViolation {
    Axiom axiom;
    std::size_t x;
    std::size_t y;
    std::size_t z;  ///< only meaningful for Axiom::Triangle
    double excess;  ///< how far the value is past the bound
};

struct ValidationReport {
    std::vector<AxiomViolation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Checks rho(x,x)=1, 0<rho(x,y)<1 off the diagonal, symmetry, and
/// rho(x,z)+rho(z,y) <= 1+rho(x,y) for every triple.
ValidationReport validate_relationships(const RelationshipTable& table);

/// Same as above for raw rows; non-square or non-finite input throws StructuralError.
ValidationReport validate_relationships(const std::vector<std::vector<double>>& rows);

struct GeneratorParams {
    double epsilon = 0.05;   ///< pairwise distances land in [epsilon, 1-epsilon]
    std::size_t dimension = 2;
    friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

/// Random relationships from a Euclidean embedding: persons are points in the
/// unit box, distances are affinely squeezed into [eps, 1-eps], and
/// rho = 1 - distance. Adding a constant to the off-diagonal of a metric keeps
/// it a metric, so the triangle-like axiom holds by construction.
RelationshipTable generate_relationships(std::size_t n, std::uint64_t seed,
                                         const GeneratorParams& params = {});

/// The static world (P, rho, E).
class Society {
public:
    /// Throws std::invalid_argument if the table fails validation or a count is zero.
    Society(std::size_t persons, std::size_t estate, RelationshipTable relationships);

    std::size_t person_count() const noexcept { return persons_; }
    std::size_t good_count() const noexcept { return estate_; }
    const RelationshipTable& relationships() const noexcept { return relationships_; }

    /// rho(x, y); throws std::out_of_range on a bad id.
    double relationship(PersonId x, PersonId y) const;

    friend bool operator==(const Society&, const Society&) = default;

private:
    std::size_t persons_;
    std::size_t estate_;
    RelationshipTable relationships_;
};

inline double relationship(const Society& society, PersonId x, PersonId y) {
    return society.relationship(x, y);
}

/// alpha: E -> P, stored as owner per good.
struct SocialAssignment {
    std::vector<PersonId> owner;

    PersonId operator[](GoodId a) const { return owner.at(a.value); }
    std::size_t size() const noexcept { return owner.size(); }
    friend bool operator==(const SocialAssignment&, const SocialAssignment&) = default;
};

/// Good a goes to person a mod |P|.
SocialAssignment round_robin_assignment(const Society& society);

/// Throws StateError unless the assignment covers every good with an in-range owner.
void check_assignment(const Society& society, const SocialAssignment& assignment);

nlohmann::json society_to_json(const Society& society);

/// Parses {"persons", "estate", "relationships"} and validates the table.
/// Throws StructuralError on shape problems and std::invalid_argument on
/// axiom violations.
Society society_from_json(const nlohmann::json& doc);

nlohmann::json assignment_to_json(const SocialAssignment& assignment);
SocialAssignment assignment_from_json(const nlohmann::json& doc);

}  // namespace everwill
