#pragma once

#include "sparsedep/assertion.hpp"
#include "sparsedep/encoding.hpp"
#include "sparsedep/parser.hpp"
#include "sparsedep/two_phase.hpp"

#include <nlohmann/json_fwd.hpp>

#include <set>
#include <string>
#include <vector>

namespace sparsedep {

enum class VerdictStatus { UnsatAffine, UnsatWithProperties, MaybeSat, UnknownCapped };
std::string to_string(VerdictStatus s);

struct PropertyConfig {
    enum class Mode { None, Single, All };
    Mode mode = Mode::All;
    std::string category;  // for Single

    // "none", "all", "single:<category>"; throws std::invalid_argument
    static PropertyConfig parse(const std::string& text);
    std::string to_string() const;
    bool enabled(const Assertion& a) const;
};

struct AnalysisOptions {
    InstanceBudget budget;
    TwoPhaseOptions two_phase;
    bool equalities = true;
};

struct ClauseVerdict {
    bool unsat_affine = false;
    bool unsat = false;
    bool capped = false;
    bool truncated = false;   // instantiation hit max_instances
    size_t instances = 0;
    std::vector<std::string> certificate;
    std::vector<std::string> properties_used;
    std::vector<Constraint> equalities;  // over relation atoms
};

struct Verdict {
    std::string relation;
    std::string kernel;
    VerdictStatus status = VerdictStatus::MaybeSat;
    std::vector<ClauseVerdict> clauses;
    std::vector<Constraint> equalities;
    std::set<std::string> properties_used;
    double millis = 0;  // not part of deterministic output

    bool unsat() const { return status == VerdictStatus::UnsatAffine || status == VerdictStatus::UnsatWithProperties; }
    bool maybe() const { return !unsat(); }
};

Verdict analyze(const Relation& r, const std::vector<Assertion>& assertions, const PropertyConfig& cfg,
                const AnalysisOptions& opts = {});

// Equalities entailed by the clause plus instantiated assertions, without the
// verdict machinery. Empty when the clause is UNSAT.
std::vector<Constraint> discover_equalities(const Conjunction& clause, const std::vector<Assertion>& assertions,
                                            const PropertyConfig& cfg, const AnalysisOptions& opts = {});

// Worker count: SPARSEDEP_THREADS if set, else hardware concurrency.
size_t worker_count();

// Runs fn(0..n-1) on the worker pool; results are written by index so the
// outcome does not depend on scheduling.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

nlohmann::json to_json(const Verdict& v);

}  // namespace sparsedep
