#pragma once

#include "sparsedep/analysis.hpp"
#include "sparsedep/generators.hpp"
#include "sparsedep/instance.hpp"
#include "sparsedep/parser.hpp"
#include "sparsedep/superset.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sparsedep {

class EnumerationCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EnumerationLimits {
    std::uint64_t max_points = 1'000'000'000;
};

struct EnumerationStats {
    std::uint64_t points = 0;     // candidate values tried
    std::uint64_t solutions = 0;
    std::uint64_t undefined = 0;  // prefixes cut because a call left its array
    bool fallback = false;        // some iterator ran over the [-2nnz, 2nnz] box

    EnumerationStats& operator+=(const EnumerationStats& o);
};

// Every integer point of one clause on a concrete instance, values ordered as
// r.iterators(). A constraint whose call leaves its array is false there.
// Throws EnumerationCapExceeded past limits.max_points.
EnumerationStats enumerate_clause(const Relation& r, size_t clause, const ConcreteInstance& inst,
                                  const std::vector<UFSymbol>& ufs,
                                  const std::function<void(const std::vector<Int>&)>& visit,
                                  const EnumerationLimits& limits = {});

using EdgeSet = std::set<std::pair<Int, Int>>;

// (in_outer, out_outer) over all clauses.
EdgeSet dependence_pairs(const Relation& r, const ConcreteInstance& inst, const std::vector<UFSymbol>& ufs,
                         const EnumerationLimits& limits = {}, EnumerationStats* stats = nullptr);
// Same pairs as unordered edges (min, max).
EdgeSet unordered(const EdgeSet& pairs);

struct Counterexample {
    std::string kind;  // unsat, equality, superset, instance
    std::string relation;
    std::string detail;
    nlohmann::json instance;
};

struct OracleReport {
    std::string problem;
    std::string preset;
    size_t instances = 0;
    size_t checks = 0;
    EnumerationStats stats;
    std::vector<Counterexample> counterexamples;
    std::vector<std::string> warnings;

    bool ok() const { return counterexamples.empty(); }
    nlohmann::json to_json() const;
};

// Tries to refute every UNSAT clause, every certified equality and every
// superset claim on the given instances. Verdicts are matched to relations by
// name; instances are checked against the problem's assertions first.
OracleReport falsify(const Problem& p, const std::vector<Verdict>& verdicts,
                     const std::vector<SupersetClaim>& claims, const std::vector<ConcreteInstance>& instances,
                     const EnumerationLimits& limits = {});

// Deliberately wrong claims built from the problem: a satisfiable relation
// declared UNSAT, a false equality, a reversed superset claim. Returns the
// corruptions the oracle failed to catch; empty means the oracle works.
// Kinds that cannot be built on these instances are reported in skipped.
std::vector<std::string> oracle_self_test(const Problem& p, const std::vector<ConcreteInstance>& instances,
                                          std::vector<std::string>* skipped = nullptr,
                                          const EnumerationLimits& limits = {});

}  // namespace sparsedep
