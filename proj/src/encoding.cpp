#include "sparsedep/encoding.hpp"

#include <algorithm>

namespace sparsedep {

namespace {

bool refuted(const ConstraintStore& store, const Constraint& c) {
    if (c.is_eq())
        return store.entails(Constraint::geq(c.expr - 1)) || store.entails(Constraint::geq(-c.expr - 1));
    return store.entails(negate_geq(c));
}

std::string render(const Conjunction& c) { return c.empty() ? "true" : c.to_string(); }

}  // namespace

Encoding::Encoding(const Conjunction& clause) {
    building_ = true;
    for (const auto& c : clause.constraints()) system_.add(encode(c));
    building_ = false;
    std::vector<EncodedInstance> open = take_new_obligations();
    ConstraintStore store(system_);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<EncodedInstance> rest;
        for (auto& ob : open) {
            if (store.entails(ob.antecedent)) {
                for (const auto& c : ob.consequent.constraints()) {
                    system_.add(c);
                    store.add(c);
                }
                ++direct_;
                changed = true;
                continue;
            }
            bool dead = false;
            for (const auto& a : ob.antecedent.constraints())
                if (refuted(store, a)) dead = true;
            if (!dead) rest.push_back(std::move(ob));
        }
        open = std::move(rest);
    }
    pending_ = std::move(open);
}

const Atom* Encoding::term_of(const std::string& var) const {
    auto it = terms_.find(var);
    return it == terms_.end() ? nullptr : &it->second;
}

size_t Encoding::bind(const Atom& rewritten) {
    // rebuild the original term from the rewritten arguments
    std::vector<AffineExpr> original_args;
    for (const auto& a : rewritten.args()) original_args.push_back(decode(a));
    Atom original = Atom::call(rewritten.name(), original_args);
    auto it = by_key_.find(original.key());
    if (it != by_key_.end()) return it->second;
    size_t id = bindings_.size();
    UFBinding b{original, original.key(), rewritten.args()};
    for (size_t k = 0; k < bindings_.size(); ++k) {
        const UFBinding& other = bindings_[k];
        if (other.term.name() != b.term.name() || other.args.size() != b.args.size()) continue;
        EncodedInstance ob;
        ob.name = "consistency(" + b.term.name() + ")";
        Conjunction ante_text;
        for (size_t a = 0; a < b.args.size(); ++a) {
            ob.antecedent.add(Constraint::eq(other.args[a] - b.args[a]));
            ante_text.add(Constraint::equal(other.term.args()[a], b.term.args()[a]));
        }
        ob.consequent.add(Constraint::equal(AffineExpr(Atom::iterator(other.var)), AffineExpr(Atom::iterator(b.var))));
        ob.text = "(" + render(ante_text) + ") -> (" + other.term.key() + " = " + b.term.key() + ")";
        fresh_obligations_.push_back(std::move(ob));
    }
    by_key_[b.var] = id;
    terms_.emplace(b.var, original);
    bindings_.push_back(std::move(b));
    return id;
}

AffineExpr Encoding::encode(const AffineExpr& e) {
    return e.rewrite([&](const Atom& a) -> std::optional<AffineExpr> {
        if (a.kind() == AtomKind::Symbolic) plain_.emplace(a.name(), a);
        if (!a.is_call()) return std::nullopt;
        size_t id = bind(a);
        return AffineExpr(Atom::iterator(bindings_[id].var));
    });
}

Constraint Encoding::encode(const Constraint& c) { return Constraint{c.kind, encode(c.expr), c.tag}; }

Conjunction Encoding::encode(const Conjunction& c) {
    Conjunction out;
    for (const auto& x : c.constraints()) out.add(encode(x));
    return out;
}

std::vector<EncodedInstance> Encoding::take_new_obligations() {
    std::vector<EncodedInstance> out;
    out.swap(fresh_obligations_);
    return out;
}

AffineExpr Encoding::decode(const AffineExpr& e) const {
    return e.rewrite([&](const Atom& a) -> std::optional<AffineExpr> {
        if (a.kind() != AtomKind::Iterator) return std::nullopt;
        auto t = terms_.find(a.name());
        if (t != terms_.end()) return AffineExpr(t->second);
        auto p = plain_.find(a.name());
        if (p != plain_.end()) return AffineExpr(p->second);
        return std::nullopt;
    });
}

Constraint Encoding::decode(const Constraint& c) const { return normalize(Constraint{c.kind, decode(c.expr), c.tag}); }

std::vector<AffineExpr> ground_terms(const Conjunction& clause) {
    std::vector<Atom> calls;
    for (const auto& c : clause.constraints()) c.expr.collect_calls(calls);
    std::vector<AffineExpr> out;
    for (const auto& call : calls)
        for (const auto& a : call.args()) out.push_back(a);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<AffineExpr> ground_terms(const Relation& r) {
    std::vector<AffineExpr> out;
    for (const auto& c : r.clauses) {
        auto e = ground_terms(c);
        out.insert(out.end(), e.begin(), e.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace sparsedep
