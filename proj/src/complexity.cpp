#include "sparsedep/complexity.hpp"

#include "sparsedep/encoding.hpp"
#include "sparsedep/parser.hpp"
#include "sparsedep/presburger.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace sparsedep {

namespace {

std::string power(const std::string& base, int k) {
    if (k == 1) return base;
    return base + "^" + std::to_string(k);
}

}  // namespace

std::string Monomial::to_string() const {
    int nnz = std::min(n_pow, avg_pow);
    std::vector<std::string> parts;
    if (n_pow - nnz > 0) parts.push_back(power("n", n_pow - nnz));
    if (nnz > 0) parts.push_back(power("nnz", nnz));
    if (avg_pow - nnz > 0) parts.push_back(power("(nnz/n)", avg_pow - nnz));
    if (parts.empty()) return "1";
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "*") + p;
    return out;
}

ComplexityExpr ComplexityExpr::single(Monomial m, Int coef) {
    ComplexityExpr e;
    if (coef != 0) e.terms[m] = coef;
    return e;
}

ComplexityExpr& ComplexityExpr::operator+=(const ComplexityExpr& other) {
    for (const auto& [m, c] : other.terms) {
        terms[m] += c;
        if (terms[m] == 0) terms.erase(m);
    }
    return *this;
}

int compare(const Monomial& a, const Monomial& b, Int density) {
    return compare(ComplexityExpr::single(a), ComplexityExpr::single(b), density);
}

int compare(const ComplexityExpr& a, const ComplexityExpr& b, Int density) {
    std::map<int, Int> poly;  // power of n -> weight
    auto add = [&](const ComplexityExpr& e, int sign) {
        for (const auto& [m, c] : e.terms) {
            Int w = c;
            for (int k = 0; k < m.avg_pow; ++k) w *= density;
            poly[m.n_pow] += sign * w;
        }
    };
    add(a, 1);
    add(b, -1);
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
        if (it->second > 0) return 1;
        if (it->second < 0) return -1;
    }
    return 0;
}

bool within(const ComplexityExpr& a, const ComplexityExpr& kernel, Int density) {
    // only the leading order matters for the kernel comparison; constant
    // factors of the kernel are symbolic
    ComplexityExpr k;
    for (const auto& [m, c] : kernel.terms) k.terms[m] = 1;
    if (a.zero()) return true;
    // highest monomial of a against highest monomial of the kernel
    auto top = [&](const ComplexityExpr& e) {
        Monomial best = e.terms.begin()->first;
        for (const auto& [m, c] : e.terms)
            if (compare(m, best, density) > 0) best = m;
        return best;
    };
    return compare(top(a), top(k), density) <= 0;
}

std::string ComplexityExpr::to_string() const {
    if (terms.empty()) return "0";
    std::vector<std::pair<Monomial, Int>> items(terms.begin(), terms.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
        int c = compare(x.first, y.first);
        if (c != 0) return c > 0;
        return x.first < y.first;
    });
    std::string out;
    for (const auto& [m, c] : items) {
        if (!out.empty()) out += " + ";
        if (c != 1) out += std::to_string(c);
        out += "(" + m.to_string() + ")";
    }
    return out;
}

ComplexityExpr ComplexityExpr::parse(const std::string& raw) {
    std::string text;
    for (size_t k = 0; k < raw.size(); ++k) {
        // accept the multiplication sign as '*'
        if (raw.compare(k, 2, "\xC3\x97") == 0) {
            text += '*';
            ++k;
            continue;
        }
        if (!std::isspace(static_cast<unsigned char>(raw[k]))) text += raw[k];
    }
    ComplexityExpr out;
    if (text == "0") return out;
    auto fail = [&]() { throw std::invalid_argument("bad complexity expression '" + raw + "'"); };
    size_t p = 0;
    auto parse_factor_list = [&](const std::string& body) {
        Monomial m;
        size_t q = 0;
        while (q < body.size()) {
            int n_add = 0, avg_add = 0;
            if (body.compare(q, 7, "(nnz/n)") == 0) {
                avg_add = 1;
                q += 7;
            } else if (body.compare(q, 5, "nnz/n") == 0) {
                avg_add = 1;
                q += 5;
            } else if (body.compare(q, 3, "nnz") == 0) {
                n_add = avg_add = 1;
                q += 3;
            } else if (body.compare(q, 1, "n") == 0) {
                n_add = 1;
                q += 1;
            } else if (body.compare(q, 1, "1") == 0) {
                q += 1;
            } else {
                fail();
            }
            int exp = 1;
            if (q < body.size() && body[q] == '^') {
                ++q;
                size_t r = q;
                while (r < body.size() && std::isdigit(static_cast<unsigned char>(body[r]))) ++r;
                if (r == q) fail();
                exp = std::stoi(body.substr(q, r - q));
                q = r;
            }
            m.n_pow += n_add * exp;
            m.avg_pow += avg_add * exp;
            if (q < body.size()) {
                if (body[q] != '*') fail();
                ++q;
            }
        }
        return m;
    };
    while (p < text.size()) {
        size_t end = p;
        int depth = 0;
        while (end < text.size() && !(depth == 0 && text[end] == '+')) {
            if (text[end] == '(') ++depth;
            if (text[end] == ')') --depth;
            ++end;
        }
        std::string term = text.substr(p, end - p);
        p = end + 1;
        size_t q = 0;
        Int coef = 1;
        while (q < term.size() && std::isdigit(static_cast<unsigned char>(term[q]))) ++q;
        if (q > 0) coef = std::stoll(term.substr(0, q));
        if (q < term.size() && (term[q] == 'k' || term[q] == 'K')) ++q;
        std::string body = term.substr(q);
        if (body.size() >= 2 && body.front() == '(' && body.back() == ')') {
            // strip one pair of parentheses unless they belong to (nnz/n)
            std::string inner = body.substr(1, body.size() - 2);
            if (body != "(nnz/n)") body = inner;
        }
        if (body.empty()) fail();
        out += single(parse_factor_list(body), coef);
    }
    return out;
}

std::string to_string(LoopKind k) {
    switch (k) {
        case LoopKind::Dimension: return "dimension";
        case LoopKind::Nonzeros: return "nonzeros";
        case LoopKind::UFRange: return "uf-range";
        case LoopKind::Derived: return "derived";
        case LoopKind::Constant: return "constant";
    }
    return "dimension";
}

Monomial LoopNestModel::cost() const {
    Monomial m;
    for (const auto& s : steps) {
        switch (s.kind) {
            case LoopKind::Dimension: m.n_pow += 1; break;
            case LoopKind::Nonzeros: m.n_pow += 1; m.avg_pow += 1; break;
            case LoopKind::UFRange: m.avg_pow += 1; break;
            case LoopKind::Derived:
            case LoopKind::Constant: break;
        }
    }
    return m;
}

size_t LoopNestModel::loops() const {
    size_t n = 0;
    for (const auto& s : steps)
        if (s.kind != LoopKind::Derived && s.kind != LoopKind::Constant) ++n;
    return n;
}

namespace {

SymbolRole role_of(const Relation& r, const std::string& name) {
    for (const auto& s : r.symconsts)
        if (s.name == name) return s.role;
    return default_role(name);
}

bool available(const Atom& a, const std::set<std::string>& have) {
    if (a.kind() == AtomKind::Symbolic) return true;
    if (a.kind() == AtomKind::Iterator) return have.count(a.name()) > 0;
    std::set<std::string> its;
    for (const auto& arg : a.args()) arg.collect_iterators(its);
    for (const auto& it : its)
        if (!have.count(it)) return false;
    return true;
}

struct Option {
    LoopKind kind = LoopKind::Dimension;
    Monomial cost;
    std::vector<Constraint> bounds;
    AffineExpr value;
    std::string parent;
    bool ok = false;
};

Monomial kind_cost(LoopKind k) {
    switch (k) {
        case LoopKind::Dimension: return {1, 0};
        case LoopKind::Nonzeros: return {1, 1};
        case LoopKind::UFRange: return {0, 1};
        case LoopKind::Derived:
        case LoopKind::Constant: return {0, 0};
    }
    return {};
}

Option option_for(const Relation& r, const Conjunction& residual, const std::string& v,
                  const std::set<std::string>& have) {
    Option best;
    const Atom var = Atom::iterator(v);
    std::vector<Constraint> usable;
    for (const auto& c : residual.constraints()) {
        if (c.expr.coefficient(var) == 0) continue;
        bool ok = true;
        for (const auto& t : c.expr.terms())
            if (!(t.atom == var) && !available(t.atom, have)) ok = false;
        if (ok) usable.push_back(c);
    }
    // derivation through a unit-coefficient equality
    for (const auto& c : usable) {
        Int a = c.expr.coefficient(var);
        if (!c.is_eq() || (a != 1 && a != -1)) continue;
        AffineExpr rest = c.expr - AffineExpr(var, a);
        best.kind = LoopKind::Derived;
        best.value = a == 1 ? -rest : rest;
        best.cost = {};
        best.bounds = usable;
        best.ok = true;
        return best;
    }
    std::vector<const Constraint*> lower, upper;
    for (const auto& c : usable) {
        Int a = c.expr.coefficient(var);
        if (c.is_eq() || a > 0) lower.push_back(&c);
        if (c.is_eq() || a < 0) upper.push_back(&c);
    }
    auto features = [&](const Constraint& c, bool& uf, bool& iter, bool& nnz_sym, std::string& parent) {
        uf = iter = nnz_sym = false;
        for (const auto& t : c.expr.terms()) {
            if (t.atom == var) continue;
            if (t.atom.is_call()) {
                uf = true;
                std::set<std::string> its;
                for (const auto& arg : t.atom.args()) arg.collect_iterators(its);
                if (!its.empty() && parent.empty()) parent = *its.begin();
            } else if (t.atom.kind() == AtomKind::Iterator) {
                iter = true;
            } else if (role_of(r, t.atom.name()) == SymbolRole::NonzeroCount) {
                nnz_sym = true;
            }
        }
    };
    for (const auto* lo : lower) {
        for (const auto* hi : upper) {
            bool luf, lit, lnnz, huf, hit, hnnz;
            std::string parent;
            features(*lo, luf, lit, lnnz, parent);
            features(*hi, huf, hit, hnnz, parent);
            LoopKind kind;
            // width independent of everything but constants
            AffineExpr width = lo->expr * (-hi->expr.coefficient(var)) + hi->expr * lo->expr.coefficient(var);
            if (width.terms().empty() && !lo->is_eq() && !hi->is_eq())
                kind = LoopKind::Constant;
            else if (luf && huf)
                kind = LoopKind::UFRange;
            else if (luf || huf)
                kind = (luf ? hit : lit) ? LoopKind::UFRange : LoopKind::Nonzeros;
            else
                kind = (lnnz || hnnz) ? LoopKind::Nonzeros : LoopKind::Dimension;
            Monomial c = kind_cost(kind);
            if (!best.ok || compare(c, best.cost) < 0) {
                best.ok = true;
                best.kind = kind;
                best.cost = c;
                best.parent = kind == LoopKind::UFRange ? parent : "";
            }
        }
    }
    best.bounds = usable;
    return best;
}

}  // namespace

LoopNestModel model_loops(const Relation& r, size_t clause, const std::vector<Constraint>& equalities) {
    LoopNestModel model;
    model.relation = r.name;
    model.clause = clause;
    Conjunction system;
    for (const auto& c : r.clauses.at(clause).constraints()) {
        if (c.tag == Tag::May)
            model.guards.add(c);
        else
            system.add(c);
    }
    for (const auto& e : equalities) system.add(e);

    std::set<std::string> in_args;
    for (const auto& c : system.constraints()) c.expr.collect_call_arg_iterators(in_args);
    for (const auto& c : model.guards.constraints()) {
        c.expr.collect_call_arg_iterators(in_args);
        c.expr.collect_iterators(in_args);
    }

    Encoding enc;
    LinearSystem ls;
    for (const auto& c : system.constraints()) ls.add(enc.encode(c));
    std::vector<std::string> keep;
    for (const auto& it : r.iterators()) {
        bool outer = it == r.in_outer() || it == r.out_outer();
        bool unit = true;
        if (auto idx = ls.index(it)) {
            for (const auto& row : ls.eqs())
                if (row.at(*idx) != 0 && row.at(*idx) != 1 && row.at(*idx) != -1) unit = false;
            for (const auto& row : ls.ineqs())
                if (row.at(*idx) != 0 && row.at(*idx) != 1 && row.at(*idx) != -1) unit = false;
        }
        if (outer || in_args.count(it) || !unit) {
            keep.push_back(it);
            continue;
        }
        ls = eliminate(ls, it).system;
        model.projected.push_back(it);
    }
    for (const auto& c : ls.constraints()) {
        Constraint d = enc.decode(c);
        if (d.truth() == std::optional<bool>(true)) continue;
        model.residual.add(d);
    }

    const size_t n = keep.size();
    if (n > 16) {
        model.bounded = false;
        model.diagnostic = "too many iterators to schedule";
        return model;
    }
    struct Cell {
        bool reached = false;
        Monomial cost;
        size_t prev = 0;
        size_t var = 0;
        Option opt;
    };
    std::vector<Cell> dp(size_t{1} << n);
    dp[0].reached = true;
    for (size_t mask = 0; mask < dp.size(); ++mask) {
        if (!dp[mask].reached) continue;
        std::set<std::string> have;
        for (size_t k = 0; k < n; ++k)
            if (mask & (size_t{1} << k)) have.insert(keep[k]);
        for (size_t k = 0; k < n; ++k) {
            if (mask & (size_t{1} << k)) continue;
            Option opt = option_for(r, model.residual, keep[k], have);
            if (!opt.ok) continue;
            Monomial c{dp[mask].cost.n_pow + opt.cost.n_pow, dp[mask].cost.avg_pow + opt.cost.avg_pow};
            Cell& next = dp[mask | (size_t{1} << k)];
            if (!next.reached || compare(c, next.cost) < 0) {
                next.reached = true;
                next.cost = c;
                next.prev = mask;
                next.var = k;
                next.opt = std::move(opt);
            }
        }
    }
    size_t full = dp.size() - 1;
    if (!dp[full].reached) {
        model.bounded = false;
        // name an iterator that never gets a finite range
        size_t best = 0;
        for (size_t mask = 0; mask < dp.size(); ++mask)
            if (dp[mask].reached && __builtin_popcountll(mask) > __builtin_popcountll(best)) best = mask;
        for (size_t k = 0; k < n; ++k)
            if (!(best & (size_t{1} << k))) {
                model.diagnostic = "iterator '" + keep[k] + "' has no finite bound";
                break;
            }
        return model;
    }
    std::vector<LoopStep> steps;
    for (size_t mask = full; mask != 0; mask = dp[mask].prev) {
        const Cell& c = dp[mask];
        LoopStep s;
        s.var = keep[c.var];
        s.kind = c.opt.kind;
        s.bounds = c.opt.bounds;
        s.value = c.opt.value;
        s.parent = c.opt.parent;
        steps.push_back(std::move(s));
    }
    std::reverse(steps.begin(), steps.end());
    model.steps = std::move(steps);
    return model;
}

ComplexityExpr estimate(const Relation& r, const std::vector<Constraint>& equalities) {
    ComplexityExpr out;
    for (size_t c = 0; c < r.clauses.size(); ++c) {
        LoopNestModel m = model_loops(r, c, equalities);
        if (!m.bounded) throw std::runtime_error(r.name + ": " + m.diagnostic);
        out += ComplexityExpr::single(m.cost());
    }
    return out;
}

ComplexityExpr estimate(const Relation& r, const std::vector<std::vector<Constraint>>& per_clause) {
    ComplexityExpr out;
    for (size_t c = 0; c < r.clauses.size(); ++c) {
        LoopNestModel m = model_loops(r, c, c < per_clause.size() ? per_clause[c] : std::vector<Constraint>{});
        if (!m.bounded) throw std::runtime_error(r.name + ": " + m.diagnostic);
        out += ComplexityExpr::single(m.cost());
    }
    return out;
}

}  // namespace sparsedep
