#pragma once

#include "sparsedep/constraint_store.hpp"
#include "sparsedep/encoding.hpp"

#include <string>
#include <vector>

namespace sparsedep {

struct TwoPhaseOptions {
    int sweeps = 4;
    size_t max_disjunctive = 100;
    size_t node_budget = 20000;  // phase-2 search nodes
    bool phase2 = true;
};

struct TraceEntry {
    std::string instance;
    std::string action;  // fired | contrapositive | satisfied | split | dropped
};

struct TwoPhaseResult {
    bool unsat = false;
    bool unsat_phase1 = false;
    bool capped = false;          // phase-2 budget or solver cap hit
    Conjunction augmented;        // clause plus phase-1 additions
    std::vector<size_t> used;     // instances fired or split on
    std::vector<size_t> pending;  // instances left for phase 2
    std::vector<TraceEntry> trace;
};

TwoPhaseResult apply_two_phase(const Conjunction& system, const std::vector<EncodedInstance>& instances,
                               const TwoPhaseOptions& opts = {});

}  // namespace sparsedep
