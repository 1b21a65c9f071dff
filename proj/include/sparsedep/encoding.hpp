#pragma once

#include "sparsedep/assertion.hpp"
#include "sparsedep/constraint_store.hpp"
#include "sparsedep/relation.hpp"

#include <map>
#include <string>
#include <vector>

namespace sparsedep {

struct UFBinding {
    Atom term;                      // original call atom
    std::string var;                // fresh variable (the term's key)
    std::vector<AffineExpr> args;   // arguments with inner calls already bound
};

// Functional consistency obligation between two bindings of one symbol,
// as an encoded instance: args equal -> results equal.
struct EncodedInstance {
    std::string name;      // assertion name, or "consistency(f)"
    std::string text;      // instance rendered over original terms
    Conjunction antecedent;
    Conjunction consequent;
};

// Ackermann encoding of one clause. Fresh variables are named by the term
// key, so decoding is a lookup.
class Encoding {
public:
    Encoding() = default;
    // Encodes the clause; consistency obligations whose argument equality is
    // entailed become equalities of the system, refuted ones are dropped, the
    // rest stay pending.
    explicit Encoding(const Conjunction& clause);

    const std::vector<UFBinding>& bindings() const { return bindings_; }
    const Conjunction& system() const { return system_; }
    const std::vector<EncodedInstance>& pending() const { return pending_; }
    size_t direct_equalities() const { return direct_; }

    // Encode an expression / constraint, binding new call terms on the fly.
    // New bindings generate consistency obligations (see take_new_obligations).
    AffineExpr encode(const AffineExpr& e);
    Constraint encode(const Constraint& c);
    Conjunction encode(const Conjunction& c);
    // Obligations created by encode() since the last call.
    std::vector<EncodedInstance> take_new_obligations();

    // Map fresh variables back to call atoms.
    AffineExpr decode(const AffineExpr& e) const;
    Constraint decode(const Constraint& c) const;

    bool is_fresh(const std::string& var) const { return terms_.count(var) > 0; }
    const Atom* term_of(const std::string& var) const;

private:
    size_t bind(const Atom& call);

    std::vector<UFBinding> bindings_;
    std::map<std::string, size_t> by_key_;
    std::map<std::string, Atom> terms_;
    std::map<std::string, Atom> plain_;  // symbolic atoms by name
    Conjunction system_;
    std::vector<EncodedInstance> pending_;
    std::vector<EncodedInstance> fresh_obligations_;
    size_t direct_ = 0;
    bool building_ = false;
};

// Ground-term set E: every argument expression of every call, nested calls
// included, deduplicated and sorted.
std::vector<AffineExpr> ground_terms(const Conjunction& clause);
std::vector<AffineExpr> ground_terms(const Relation& r);

}  // namespace sparsedep
