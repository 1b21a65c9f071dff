#pragma once

#include "sparsedep/expr.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sparsedep {

enum class ConstraintKind { EQ = 0, GEQ = 1 };
enum class Tag { Exact = 0, May = 1 };

struct Constraint {
    ConstraintKind kind = ConstraintKind::GEQ;
    AffineExpr expr;
    Tag tag = Tag::Exact;

    static Constraint eq(AffineExpr e, Tag tag = Tag::Exact) { return {ConstraintKind::EQ, std::move(e), tag}; }
    static Constraint geq(AffineExpr e, Tag tag = Tag::Exact) { return {ConstraintKind::GEQ, std::move(e), tag}; }
    // lhs <= rhs, lhs < rhs, lhs = rhs
    static Constraint le(const AffineExpr& lhs, const AffineExpr& rhs, Tag tag = Tag::Exact);
    static Constraint lt(const AffineExpr& lhs, const AffineExpr& rhs, Tag tag = Tag::Exact);
    static Constraint equal(const AffineExpr& lhs, const AffineExpr& rhs, Tag tag = Tag::Exact);

    bool is_eq() const { return kind == ConstraintKind::EQ; }
    // Constant-only constraint status: nullopt if it has terms.
    std::optional<bool> truth() const;
    Constraint substitute(const Atom& atom, const AffineExpr& replacement) const;

    std::string to_string() const;
    bool operator==(const Constraint& other) const = default;
    std::strong_ordering operator<=>(const Constraint& other) const;
};

// gcd-normalize; GEQ constants are floor-divided, EQ gets a positive leading
// coefficient. An EQ whose constant is not divisible by the gcd is left
// undivided (it has no integer solution; the solver reports that).
Constraint normalize(const Constraint& c);
// negation of a GEQ constraint: not(e >= 0) is -e - 1 >= 0
Constraint negate_geq(const Constraint& c);

class Conjunction {
public:
    Conjunction() = default;
    explicit Conjunction(std::vector<Constraint> constraints);

    void add(const Constraint& c);
    const std::vector<Constraint>& constraints() const { return constraints_; }
    size_t size() const { return constraints_.size(); }
    bool empty() const { return constraints_.empty(); }
    bool contains(const Constraint& c) const;
    bool subset_of(const Conjunction& other) const;

    std::string to_string() const;
    bool operator==(const Conjunction& other) const = default;

private:
    std::vector<Constraint> constraints_;  // normalized, sorted, unique
};

enum class SymbolRole { Size, NonzeroCount, Other };

struct SymbolicConst {
    std::string name;
    std::optional<Int> lower_hint;
    SymbolRole role = SymbolRole::Other;
};

struct UFSymbol {
    std::string name;
    int arity = 1;
    std::string array;  // instance array bound to this symbol
};

struct Relation {
    std::string name;
    std::vector<std::string> in_tuple;
    std::vector<std::string> out_tuple;
    std::vector<std::string> existentials;
    std::vector<SymbolicConst> symconsts;
    std::vector<Conjunction> clauses;
    std::map<std::string, std::string> source;  // kernel, access, note, file, line

    std::string kernel() const;
    std::vector<std::string> iterators() const;
    bool is_iterator(const std::string& name) const;
    const std::string& in_outer() const { return in_tuple.front(); }
    const std::string& out_outer() const { return out_tuple.front(); }

    // Canonical text of the relation body, without name or metadata.
    std::string to_string() const;
};

// Every call atom of the relation, nested ones included, deduplicated and
// ordered innermost first.
std::vector<Atom> free_uf_terms(const Relation& r);
std::vector<Atom> free_uf_terms(const Conjunction& c);

// Rename iterators of a constraint / conjunction.
Constraint rename(const Constraint& c, const std::map<std::string, std::string>& names);
Conjunction rename(const Conjunction& c, const std::map<std::string, std::string>& names);

// Printed form with iterators renamed by tuple position and clauses sorted;
// equal keys mean the same relation up to iterator names.
std::string canonical_key(const Relation& r);
// In and out tuples swapped.
Relation mirror(const Relation& r);

}  // namespace sparsedep
