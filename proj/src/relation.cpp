#include "sparsedep/relation.hpp"

#include <algorithm>

namespace sparsedep {

Constraint Constraint::le(const AffineExpr& lhs, const AffineExpr& rhs, Tag tag) {
    return normalize(geq(rhs - lhs, tag));
}

Constraint Constraint::lt(const AffineExpr& lhs, const AffineExpr& rhs, Tag tag) {
    return normalize(geq(rhs - lhs - 1, tag));
}

Constraint Constraint::equal(const AffineExpr& lhs, const AffineExpr& rhs, Tag tag) {
    return normalize(eq(lhs - rhs, tag));
}

std::optional<bool> Constraint::truth() const {
    if (!expr.is_constant()) return std::nullopt;
    return is_eq() ? expr.constant() == 0 : expr.constant() >= 0;
}

Constraint Constraint::substitute(const Atom& atom, const AffineExpr& replacement) const {
    return normalize(Constraint{kind, expr.substitute(atom, replacement), tag});
}

std::strong_ordering Constraint::operator<=>(const Constraint& other) const {
    if (kind != other.kind) return static_cast<int>(kind) <=> static_cast<int>(other.kind);
    if (auto c = expr <=> other.expr; c != 0) return c;
    return static_cast<int>(tag) <=> static_cast<int>(other.tag);
}

std::string Constraint::to_string() const {
    AffineExpr pos, neg;
    for (const auto& t : expr.terms()) {
        if (t.coef > 0)
            pos.add_term(t.atom, t.coef);
        else
            neg.add_term(t.atom, -t.coef);
    }
    Int k = expr.constant();
    std::string text;
    if (is_eq()) {
        if (pos.is_constant() && !neg.is_constant()) std::swap(pos, neg), k = -k;
        if (k > 0) pos += k;
        if (k < 0) neg += -k;
        text = pos.to_string() + " = " + neg.to_string();
    } else {
        if (k > 0) pos += k;
        if (k < 0) neg += -k;
        text = neg.to_string() + " <= " + pos.to_string();
    }
    if (tag == Tag::May) return "may(" + text + ")";
    return text;
}

Constraint normalize(const Constraint& c) {
    Constraint out = c;
    Int g = 0;
    for (const auto& t : c.expr.terms()) g = gcd_int(g, t.coef);
    if (g == 0) {
        // constant-only: canonical true/false forms
        Int k = c.expr.constant();
        if (c.is_eq())
            out.expr = AffineExpr(k == 0 ? 0 : 1);
        else
            out.expr = AffineExpr(k >= 0 ? 0 : -1);
        return out;
    }
    if (c.is_eq()) {
        Int sign = c.expr.terms().front().coef < 0 ? -1 : 1;
        if (c.expr.constant() % g == 0) {
            AffineExpr e;
            for (const auto& t : c.expr.terms()) e.add_term(t.atom, sign * t.coef / g);
            e.set_constant(sign * c.expr.constant() / g);
            out.expr = e;
        } else {
            out.expr = c.expr * sign;
        }
        return out;
    }
    if (g == 1) return out;
    AffineExpr e;
    for (const auto& t : c.expr.terms()) e.add_term(t.atom, t.coef / g);
    e.set_constant(floor_div(c.expr.constant(), g));
    out.expr = e;
    return out;
}

Constraint negate_geq(const Constraint& c) {
    return normalize(Constraint::geq(-c.expr - 1, c.tag));
}

Conjunction::Conjunction(std::vector<Constraint> constraints) {
    for (const auto& c : constraints) add(c);
}

void Conjunction::add(const Constraint& c) {
    Constraint n = normalize(c);
    auto it = std::lower_bound(constraints_.begin(), constraints_.end(), n);
    if (it != constraints_.end() && *it == n) return;
    constraints_.insert(it, n);
}

bool Conjunction::contains(const Constraint& c) const {
    return std::binary_search(constraints_.begin(), constraints_.end(), c);
}

bool Conjunction::subset_of(const Conjunction& other) const {
    return std::includes(other.constraints_.begin(), other.constraints_.end(), constraints_.begin(),
                         constraints_.end());
}

std::string Conjunction::to_string() const {
    std::string out;
    for (size_t k = 0; k < constraints_.size(); ++k) {
        if (k) out += " && ";
        out += constraints_[k].to_string();
    }
    return out;
}

std::string Relation::kernel() const {
    auto it = source.find("kernel");
    return it == source.end() ? std::string() : it->second;
}

std::vector<std::string> Relation::iterators() const {
    std::vector<std::string> out = in_tuple;
    out.insert(out.end(), out_tuple.begin(), out_tuple.end());
    out.insert(out.end(), existentials.begin(), existentials.end());
    return out;
}

bool Relation::is_iterator(const std::string& name) const {
    auto has = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), name) != v.end(); };
    return has(in_tuple) || has(out_tuple) || has(existentials);
}

namespace {
std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (size_t k = 0; k < v.size(); ++k) {
        if (k) out += ",";
        out += v[k];
    }
    return out;
}
}  // namespace

std::string Relation::to_string() const {
    std::string out = "{ [" + join(in_tuple) + "] -> [" + join(out_tuple) + "] : ";
    if (!existentials.empty()) out += "exists(" + join(existentials) + ") : ";
    for (size_t k = 0; k < clauses.size(); ++k) {
        if (k) out += " || ";
        out += clauses[k].to_string();
    }
    out += " }";
    return out;
}

std::vector<Atom> free_uf_terms(const Conjunction& c) {
    std::vector<Atom> out;
    for (const auto& con : c.constraints()) con.expr.collect_calls(out);
    return out;
}

std::vector<Atom> free_uf_terms(const Relation& r) {
    std::vector<Atom> out;
    for (const auto& clause : r.clauses)
        for (const auto& con : clause.constraints()) con.expr.collect_calls(out);
    return out;
}

Constraint rename(const Constraint& c, const std::map<std::string, std::string>& names) {
    AffineExpr e = c.expr.rewrite([&](const Atom& a) -> std::optional<AffineExpr> {
        if (a.kind() != AtomKind::Iterator) return std::nullopt;
        auto it = names.find(a.name());
        if (it == names.end()) return std::nullopt;
        return AffineExpr(Atom::iterator(it->second));
    });
    return normalize(Constraint{c.kind, e, c.tag});
}

Conjunction rename(const Conjunction& c, const std::map<std::string, std::string>& names) {
    Conjunction out;
    for (const auto& con : c.constraints()) out.add(rename(con, names));
    return out;
}

std::string canonical_key(const Relation& r) {
    std::map<std::string, std::string> names;
    std::vector<std::string> in, out, ex;
    for (size_t k = 0; k < r.in_tuple.size(); ++k) in.push_back(names[r.in_tuple[k]] = "_i" + std::to_string(k));
    for (size_t k = 0; k < r.out_tuple.size(); ++k) out.push_back(names[r.out_tuple[k]] = "_o" + std::to_string(k));
    for (size_t k = 0; k < r.existentials.size(); ++k)
        ex.push_back(names[r.existentials[k]] = "_e" + std::to_string(k));
    std::vector<std::string> clauses;
    for (const auto& c : r.clauses) clauses.push_back(rename(c, names).to_string());
    std::sort(clauses.begin(), clauses.end());
    std::string key = "[" + join(in) + "] -> [" + join(out) + "]";
    if (!ex.empty()) key += " exists(" + join(ex) + ")";
    for (const auto& c : clauses) key += " | " + c;
    return key;
}

Relation mirror(const Relation& r) {
    Relation m = r;
    std::swap(m.in_tuple, m.out_tuple);
    return m;
}

}  // namespace sparsedep
