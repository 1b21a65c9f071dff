#pragma once

#include "sparsedep/complexity.hpp"
#include "sparsedep/corpus.hpp"
#include "sparsedep/superset.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sparsedep {

// (<= kernel, total)
using CountPair = std::pair<size_t, size_t>;

struct KernelExpectation {
    std::string kernel;
    std::string title;
    std::string complexity;  // kernel complexity, coefficient dropped
    std::string source;      // where the relations were derived from
    std::optional<std::array<CountPair, 3>> checks;  // remaining, equality, superset
    std::optional<std::string> baseline;
    std::optional<std::string> simplified;
    std::map<std::string, std::string> deviations;  // cell -> rationale
};

struct Manifest {
    int version = 1;
    Int density = kDefaultDensity;
    std::vector<KernelExpectation> kernels;
    std::map<std::string, size_t> aggregates;  // relations, unique, affine_unsat, baseline, property_unsat, maybe
    size_t triangular_min = 0;
    std::map<std::string, std::string> deviations;  // aggregate cell -> rationale

    const KernelExpectation* find(const std::string& kernel) const;
    static Manifest from_json(const nlohmann::json& j);
    // Throws std::runtime_error on unreadable or malformed files.
    static Manifest load(const std::string& path);
};

struct RelationCost {
    std::string name;
    VerdictStatus status = VerdictStatus::MaybeSat;
    ComplexityExpr baseline;
    ComplexityExpr simplified;  // MAYBE only
    std::vector<std::string> equalities;
};

struct KernelRow {
    std::string kernel;
    std::string title;
    ComplexityExpr complexity;
    std::array<CountPair, 3> checks{};
    ComplexityExpr baseline;
    ComplexityExpr simplified;
    std::vector<RelationCost> relations;  // unique, corpus order
    Minimized minimized;
};

struct ReportCell {
    std::string name;  // e.g. "ic0.checks.equality"
    std::string expected;
    std::string actual;
    bool pass = false;
    std::string deviation;  // manifest rationale, if flagged
};

// single-property UNSAT counts, by category, plus "none" and "all"
using Ablation = std::map<std::string, size_t>;

struct Report {
    std::vector<KernelRow> rows;
    CorpusSummary affine;    // cfg none
    CorpusSummary combined;  // cfg all
    Ablation ablation;       // UNSAT with properties among the affine baseline
    // complexity class -> remaining MAYBE per configuration (baseline first)
    std::map<Monomial, std::map<std::string, size_t>> classes;
    std::vector<ReportCell> cells;

    bool ok() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
    std::string class_csv() const;
};

inline const std::vector<std::string>& ablation_configs() {
    static const std::vector<std::string> c = {"none", "single:monotonicity", "single:correlated_monotonicity",
                                               "single:triangular", "all"};
    return c;
}

// Table 3 and 4 rows, aggregates and ablation over the corpus, compared with
// the manifest. Deterministic in the corpus and manifest.
Report build_report(const Corpus& c, const Manifest& m, const AnalysisOptions& opts = {});

// Per-kernel rows only (no ablation); used by simplify and superset.
KernelRow kernel_row(const Corpus& c, const std::string& kernel, const std::vector<Verdict>& affine,
                     const std::vector<Verdict>& combined, const ComplexityExpr& complexity, Int density);

}  // namespace sparsedep
