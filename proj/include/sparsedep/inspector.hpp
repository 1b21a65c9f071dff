#pragma once

#include "sparsedep/analysis.hpp"
#include "sparsedep/complexity.hpp"
#include "sparsedep/instance.hpp"
#include "sparsedep/oracle.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sparsedep {

// Loop nest for one clause that may hold at runtime.
struct InspectorPlan {
    std::string relation;
    size_t clause = 0;
    std::vector<Constraint> equalities;  // empty for the baseline plan
    LoopNestModel model;
};

// One plan per clause not proven UNSAT. The simplified plans add the
// equalities certified for each clause. Throws std::runtime_error when some
// iterator has no finite bound.
std::vector<InspectorPlan> plan_inspector(const Relation& r, const Verdict& v, bool simplified);

// Runs the loop nest on an instance and returns (in_outer, out_outer) pairs.
// points, when given, accumulates the innermost iterations executed.
EdgeSet run_plan(const InspectorPlan& plan, const Relation& r, const ConcreteInstance& inst,
                 const std::vector<UFSymbol>& ufs, std::uint64_t* points = nullptr);

// C-like loop nest in the style of a generated inspector.
std::string emit_pseudo(const InspectorPlan& plan, const Relation& r);

// Undirected dependences between outer iterations, stored as (min, max).
struct DependenceGraph {
    Int n = 0;
    std::map<std::pair<Int, Int>, std::set<std::string>> edges;  // edge -> relations

    void add(const std::string& relation, const EdgeSet& pairs);
    EdgeSet edge_set() const;
    nlohmann::json to_json(const std::vector<std::vector<Int>>& levels) const;
    std::string to_dot(const std::vector<std::vector<Int>>& levels) const;
};

// Level sets: level(v) = 1 + max level of a smaller neighbour. Every vertex
// 0..n-1 lands in some level; levels are sorted.
std::vector<std::vector<Int>> wavefronts(const DependenceGraph& g);
// Every vertex placed exactly once and every edge goes to a later level.
bool valid_wavefronts(const DependenceGraph& g, const std::vector<std::vector<Int>>& levels);

}  // namespace sparsedep
