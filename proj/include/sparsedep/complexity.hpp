#pragma once

#include "sparsedep/relation.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sparsedep {

// n^n_pow * avg^avg_pow where avg = nnz/n. nnz is rendered by pairing one n
// with one avg.
struct Monomial {
    int n_pow = 0;
    int avg_pow = 0;

    std::string to_string() const;
    auto operator<=>(const Monomial&) const = default;
};

struct ComplexityExpr {
    std::map<Monomial, Int> terms;  // coefficient per monomial

    static ComplexityExpr single(Monomial m, Int coef = 1);
    // Table-4 notation: "8(n*nnz) + 4(n^2)", "nnz", "0". Throws
    // std::invalid_argument.
    static ComplexityExpr parse(const std::string& text);

    bool zero() const { return terms.empty(); }
    ComplexityExpr& operator+=(const ComplexityExpr& other);
    bool operator==(const ComplexityExpr& other) const = default;
    // Highest monomial first.
    std::string to_string() const;
};

inline constexpr Int kDefaultDensity = 8;

// Regime nnz = d*n: compare the polynomial in n whose coefficients are
// coef * d^avg_pow, leading power first. Returns <0, 0, >0.
int compare(const ComplexityExpr& a, const ComplexityExpr& b, Int density = kDefaultDensity);
int compare(const Monomial& a, const Monomial& b, Int density = kDefaultDensity);
bool within(const ComplexityExpr& a, const ComplexityExpr& kernel, Int density = kDefaultDensity);

enum class LoopKind { Dimension, Nonzeros, UFRange, Derived, Constant };
std::string to_string(LoopKind k);

struct LoopStep {
    std::string var;
    LoopKind kind = LoopKind::Dimension;
    std::vector<Constraint> bounds;  // constraints on var usable at this depth
    AffineExpr value;                // Derived: var = value
    std::string parent;              // UFRange: iterator of the bounding term
};

struct LoopNestModel {
    std::string relation;
    size_t clause = 0;
    std::vector<LoopStep> steps;
    std::vector<std::string> projected;
    Conjunction residual;  // constraints after projection, equalities included
    Conjunction guards;    // may-tagged; checked per point, never used to schedule
    bool bounded = true;
    std::string diagnostic;

    Monomial cost() const;
    size_t loops() const;
};

// may-guards never bound or derive an iterator; the iterators they mention
// stay in the nest so the guard can be checked.
LoopNestModel model_loops(const Relation& r, size_t clause, const std::vector<Constraint>& equalities = {});
// Sum over clauses of the per-clause loop-nest cost.
ComplexityExpr estimate(const Relation& r, const std::vector<Constraint>& equalities = {});
// Equalities given per clause.
ComplexityExpr estimate(const Relation& r, const std::vector<std::vector<Constraint>>& per_clause);

}  // namespace sparsedep
