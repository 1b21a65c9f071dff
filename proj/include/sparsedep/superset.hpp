#pragma once

#include "sparsedep/complexity.hpp"
#include "sparsedep/relation.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sparsedep {

enum class SupersetRule { Trivial, Overlap };
std::string to_string(SupersetRule r);

struct SupersetClaim {
    std::string superset;
    std::string subset;
    SupersetRule rule = SupersetRule::Trivial;
    std::map<std::string, std::string> mapping;  // superset iterator -> subset iterator
    // outer iterators crossed: the claim holds for the unordered edge sets
    bool mirrored = false;
    // overlap evidence
    std::string missing_equality;  // in the superset, absent from the subset (k = m')
    std::string similar_equality;  // in the subset (k = l')
    std::vector<std::string> bounds;  // superset bounds on m', checked with m' -> l'
    std::string note;
};

// A relation together with the equalities certified for each clause; the
// subset side may use them as extra constraints.
struct SupersetInput {
    const Relation* relation = nullptr;
    std::vector<std::vector<Constraint>> equalities;  // per clause, may be empty
};

std::optional<SupersetClaim> trivial_superset(const SupersetInput& r1, const SupersetInput& r2);
std::optional<SupersetClaim> overlap_superset(const SupersetInput& r1, const SupersetInput& r2);
// trivial, then overlap
std::optional<SupersetClaim> find_superset(const SupersetInput& r1, const SupersetInput& r2);

struct Minimized {
    std::vector<std::string> kept;
    std::vector<SupersetClaim> claims;      // all claims found
    std::map<std::string, std::string> discarded;  // relation -> kept superset
};

// Keeps one cheapest relation per maximal group of mutually covering
// relations; everything else has a kept superset.
Minimized minimize(const std::vector<SupersetInput>& checks, const std::vector<ComplexityExpr>& cost);

nlohmann::json to_json(const SupersetClaim& c);

}  // namespace sparsedep
