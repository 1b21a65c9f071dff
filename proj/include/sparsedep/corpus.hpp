#pragma once

#include "sparsedep/analysis.hpp"
#include "sparsedep/parser.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sparsedep {

struct CorpusEntry {
    size_t problem = 0;
    size_t relation = 0;
    std::string kernel;  // relation metadata, else the file stem
    std::string key;     // canonical_key
    std::string mirror_key;
    std::optional<size_t> duplicate_of;  // first entry of the kernel with the same key
};

struct Corpus {
    std::vector<Problem> problems;
    std::vector<CorpusEntry> entries;  // file order, then relation order
    std::vector<std::string> kernels;  // order of first appearance

    const Problem& problem(const CorpusEntry& e) const { return problems[e.problem]; }
    const Relation& relation(const CorpusEntry& e) const { return problems[e.problem].relations[e.relation]; }
    // entry indices without duplicate_of
    std::vector<size_t> unique() const;
};

// Problem files, or directories whose *.deps files are read in name order.
// ParseError propagates; a missing path throws std::runtime_error.
Corpus load_corpus(const std::vector<std::string>& paths);

// One verdict per entry. Duplicates are analyzed once and share the verdict
// (under their own name).
std::vector<Verdict> analyze_corpus(const Corpus& c, const PropertyConfig& cfg, const AnalysisOptions& opts = {});

struct StatusCounts {
    size_t relations = 0;
    size_t unique = 0;
    size_t affine_unsat = 0;
    size_t property_unsat = 0;
    size_t maybe = 0;   // capped verdicts included
    size_t capped = 0;

    size_t unsat() const { return affine_unsat + property_unsat; }
    nlohmann::json to_json() const;
};

struct CorpusSummary {
    StatusCounts total;
    std::map<std::string, StatusCounts> per_kernel;

    nlohmann::json to_json() const;
    // "unsat=57 (12 affine + 45 properties), maybe=26"
    std::string line() const;
};

// Counts over unique relations, plus the raw relation count.
CorpusSummary summarize(const Corpus& c, const std::vector<Verdict>& verdicts);

}  // namespace sparsedep
