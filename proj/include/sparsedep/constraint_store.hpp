#pragma once

#include "sparsedep/presburger.hpp"
#include "sparsedep/relation.hpp"

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sparsedep {

// All-pairs tightest difference bounds. dist(a, b) bounds x_b - x_a from
// above. Node 0 is the constant zero.
class DifferenceGraph {
public:
    static constexpr Int kInf = std::numeric_limits<Int>::max() / 4;

    DifferenceGraph();
    size_t node(const std::string& var);
    std::optional<size_t> find(const std::string& var) const;
    // x_to - x_from <= w ; returns false once the graph is infeasible
    bool add_edge(size_t from, size_t to, Int w);
    Int dist(size_t from, size_t to) const { return dist_[from][to]; }
    bool feasible() const { return feasible_; }
    size_t size() const { return names_.size(); }
    const std::string& name(size_t k) const { return names_[k]; }

private:
    std::vector<std::string> names_;
    std::map<std::string, size_t> index_;
    std::vector<std::vector<Int>> dist_;
    bool feasible_ = true;
};

// Difference view of a constraint: x_to - x_from <= w (one or two edges).
struct DifferenceEdge {
    std::string from;  // empty = zero node
    std::string to;
    Int w;
};
std::optional<std::vector<DifferenceEdge>> as_difference(const Constraint& c);

// Incremental conjunction of encoded constraints (no call atoms). Pure
// difference systems are decided on the graph; general rows fall back to
// Fourier-Motzkin.
class ConstraintStore {
public:
    ConstraintStore() = default;
    explicit ConstraintStore(const Conjunction& c, CheckOptions opts = {});

    void add(const Constraint& c);
    void add(const Conjunction& c);
    const Conjunction& constraints() const { return all_; }

    bool unsat() const;
    bool capped() const;
    bool entails(const Constraint& c) const;
    bool entails(const Conjunction& c) const;
    // Entailed equalities between variables (x = c, x - y = c) that are not
    // syntactically present.
    std::vector<Constraint> implied_equalities() const;
    LinearSystem linear() const;

private:
    void refresh() const;

    CheckOptions opts_;
    Conjunction all_;
    DifferenceGraph graph_;
    bool general_ = false;
    mutable bool dirty_ = true;
    mutable std::optional<CheckResult> cached_;
};

}  // namespace sparsedep
