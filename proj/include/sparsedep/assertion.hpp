#pragma once

#include "sparsedep/relation.hpp"

#include <string>
#include <vector>

namespace sparsedep {

enum class AssertionForm { Form1, Form2, Form3, General };

// Universally quantified implication over index-array symbols. Quantified
// variables appear in the templates as iterator atoms.
struct Assertion {
    std::string name;
    std::string category;  // monotonicity | correlated_monotonicity | triangular | general
    std::vector<std::string> vars;
    Conjunction antecedent;
    Conjunction consequent;
    AssertionForm form = AssertionForm::General;
    int c1 = 0;
    int c2 = 0;

    std::string to_string() const;
    std::vector<std::string> symbols() const;
};

// Detect forms 1-3 from the templates; leaves General when none matches.
void classify_form(Assertion& a);

// Named templates. Throws std::invalid_argument on unknown names or wrong
// symbol counts.
std::vector<Assertion> builtin(const std::string& name, const std::vector<std::string>& symbols);
std::string builtin_category(const std::string& name);

struct InstanceBudget {
    size_t max_instances = 1000;
    size_t max_disjunctive = 100;
};

struct Instance {
    std::string assertion;
    std::vector<AffineExpr> binding;
    Conjunction antecedent;
    Conjunction consequent;

    std::string to_string() const;
};

struct Instantiation {
    std::vector<Instance> instances;
    bool truncated = false;
};

// Ground-term tuples from E^n in lexicographic order over the sorted E.
Instantiation instantiate(const Assertion& a, const std::vector<AffineExpr>& ground_terms,
                          const InstanceBudget& budget);

}  // namespace sparsedep
