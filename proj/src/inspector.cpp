#include "sparsedep/inspector.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace sparsedep {

std::vector<InspectorPlan> plan_inspector(const Relation& r, const Verdict& v, bool simplified) {
    std::vector<InspectorPlan> out;
    for (size_t c = 0; c < r.clauses.size(); ++c) {
        const ClauseVerdict* cv = c < v.clauses.size() ? &v.clauses[c] : nullptr;
        if (v.unsat() || (cv && cv->unsat)) continue;
        InspectorPlan plan;
        plan.relation = r.name;
        plan.clause = c;
        if (simplified && cv) plan.equalities = cv->equalities;
        plan.model = model_loops(r, c, plan.equalities);
        if (!plan.model.bounded) throw std::runtime_error(r.name + ": " + plan.model.diagnostic);
        out.push_back(std::move(plan));
    }
    return out;
}

namespace {

struct CompiledStep {
    int slot = -1;
    LoopKind kind = LoopKind::Dimension;
    std::vector<CompiledConstraint> bounds;
    CompiledExpr value;
};

class Runner {
public:
    Runner(const InspectorPlan& plan, const Relation& r, const ConcreteInstance& inst,
           const std::vector<UFSymbol>& ufs)
        : binder_(inst, ufs, r.iterators()) {
        for (const auto& s : plan.model.steps) {
            CompiledStep cs;
            cs.slot = binder_.slot(s.var);
            cs.kind = s.kind;
            for (const auto& b : s.bounds) cs.bounds.push_back(binder_.compile(b));
            if (s.kind == LoopKind::Derived) cs.value = binder_.compile(s.value);
            steps_.push_back(std::move(cs));
        }
        for (const auto& c : plan.model.residual.constraints()) checks_.push_back(binder_.compile(c));
        for (const auto& c : plan.model.guards.constraints()) checks_.push_back(binder_.compile(c));
        // a call the clause reads must stay inside its array, even when
        // projection cancelled it out of the residual
        std::set<std::string> kept;
        for (const auto& s : plan.model.steps) kept.insert(s.var);
        std::vector<Atom> calls = free_uf_terms(r.clauses.at(plan.clause));
        for (const auto& a : calls) {
            std::set<std::string> its;
            for (const auto& arg : a.args()) arg.collect_iterators(its);
            if (std::all_of(its.begin(), its.end(), [&](const std::string& i) { return kept.count(i); }))
                domains_.push_back(binder_.compile(AffineExpr(a)));
        }
        vals_.assign(binder_.slots().size(), 0);
        src_ = binder_.slot(r.in_outer());
        dst_ = binder_.slot(r.out_outer());
    }

    EdgeSet run(std::uint64_t* points) {
        descend(0);
        if (points) *points += points_;
        return std::move(edges_);
    }

private:
    bool holds(const CompiledConstraint& c) {
        Int v;
        if (!c.expr.eval(vals_.data(), v)) return false;
        return c.eq ? v == 0 : v >= 0;
    }

    void descend(size_t depth) {
        if (depth == steps_.size()) {
            ++points_;
            for (const auto& c : checks_)
                if (!holds(c)) return;
            Int x;
            for (const auto& d : domains_)
                if (!d.eval(vals_.data(), x)) return;
            edges_.emplace(vals_[static_cast<size_t>(src_)], vals_[static_cast<size_t>(dst_)]);
            return;
        }
        const CompiledStep& s = steps_[depth];
        Int& var = vals_[static_cast<size_t>(s.slot)];
        if (s.kind == LoopKind::Derived) {
            if (!s.value.eval(vals_.data(), var)) return;
            for (const auto& b : s.bounds)
                if (!holds(b)) return;
            descend(depth + 1);
            return;
        }
        std::optional<Int> lo, hi;
        for (const auto& b : s.bounds) {
            const Int a = b.expr.coefficient(s.slot);
            var = 0;
            Int rest;
            if (!b.expr.eval(vals_.data(), rest)) return;
            if (b.eq) {
                if (rest % a != 0) return;
                lo = lo ? std::max(*lo, -rest / a) : -rest / a;
                hi = hi ? std::min(*hi, -rest / a) : -rest / a;
            } else if (a > 0) {
                Int x = ceil_div(-rest, a);
                lo = lo ? std::max(*lo, x) : x;
            } else {
                Int x = floor_div(rest, -a);
                hi = hi ? std::min(*hi, x) : x;
            }
        }
        if (!lo || !hi) throw std::logic_error("inspector loop without a finite range");
        for (Int x = *lo; x <= *hi; ++x) {
            var = x;
            descend(depth + 1);
        }
    }

    Binder binder_;
    std::vector<CompiledStep> steps_;
    std::vector<CompiledConstraint> checks_;
    std::vector<CompiledExpr> domains_;
    std::vector<Int> vals_;
    int src_ = -1, dst_ = -1;
    std::uint64_t points_ = 0;
    EdgeSet edges_;
};

// a*v + rest (>= | =) 0 solved for v
std::string bound_text(const Constraint& c, const Atom& var, bool lower) {
    const Int a = c.expr.coefficient(var);
    AffineExpr rest = c.expr - AffineExpr(var, a);
    AffineExpr num = lower ? -rest : rest;
    const Int div = lower ? a : -a;
    if (c.is_eq()) {
        num = -rest;
        if (a == 1) return num.compact();
        if (a == -1) return rest.compact();
        return "(" + num.compact() + ")/" + std::to_string(a);
    }
    if (div == 1) return num.compact();
    return std::string(lower ? "ceil" : "floor") + "((" + num.compact() + ")/" + std::to_string(div) + ")";
}

}  // namespace

EdgeSet run_plan(const InspectorPlan& plan, const Relation& r, const ConcreteInstance& inst,
                 const std::vector<UFSymbol>& ufs, std::uint64_t* points) {
    return Runner(plan, r, inst, ufs).run(points);
}

std::string emit_pseudo(const InspectorPlan& plan, const Relation& r) {
    std::ostringstream os;
    os << "// " << plan.relation;
    if (r.clauses.size() > 1) os << " clause " << plan.clause;
    os << ": " << plan.model.cost().to_string() << "\n";
    for (const auto& p : plan.model.projected) os << "// " << p << " projected out\n";
    std::string indent;
    for (const auto& s : plan.model.steps) {
        const Atom var = Atom::iterator(s.var);
        if (s.kind == LoopKind::Derived) {
            os << indent << s.var << " = " << s.value.compact() << ";\n";
            continue;
        }
        std::vector<std::string> lo, hi;
        for (const auto& b : s.bounds) {
            const Int a = b.expr.coefficient(var);
            if (b.is_eq() || a > 0) lo.push_back(bound_text(b, var, true));
            if (b.is_eq() || a < 0) hi.push_back(bound_text(b, var, false));
        }
        auto join = [](const char* fn, const std::vector<std::string>& xs) {
            if (xs.size() == 1) return xs.front();
            std::string out = std::string(fn) + "(";
            for (size_t k = 0; k < xs.size(); ++k) out += (k ? ", " : "") + xs[k];
            return out + ")";
        };
        os << indent << "for (" << s.var << " = " << join("max", lo) << "; " << s.var << " <= " << join("min", hi)
           << "; " << s.var << "++)\n";
        indent += "  ";
    }
    std::vector<std::string> conds;
    std::set<std::string> used;
    for (const auto& s : plan.model.steps)
        for (const auto& b : s.bounds) used.insert(b.to_string());
    for (const auto& c : plan.model.residual.constraints())
        if (!used.count(c.to_string())) conds.push_back(c.to_string());
    for (const auto& c : plan.model.guards.constraints()) conds.push_back(c.to_string());
    os << indent;
    if (!conds.empty()) {
        os << "if (";
        for (size_t k = 0; k < conds.size(); ++k) os << (k ? " && " : "") << conds[k];
        os << ")\n" << indent << "  ";
    }
    os << "add_edge(" << r.in_outer() << ", " << r.out_outer() << ");\n";
    return os.str();
}

void DependenceGraph::add(const std::string& relation, const EdgeSet& pairs) {
    for (const auto& [a, b] : pairs) edges[{std::min(a, b), std::max(a, b)}].insert(relation);
}

EdgeSet DependenceGraph::edge_set() const {
    EdgeSet out;
    for (const auto& [e, rels] : edges) out.insert(e);
    return out;
}

nlohmann::json DependenceGraph::to_json(const std::vector<std::vector<Int>>& levels) const {
    nlohmann::json j;
    j["n"] = n;
    j["edges"] = nlohmann::json::array();
    for (const auto& [e, rels] : edges) j["edges"].push_back({{"from", e.first}, {"to", e.second}, {"relations", rels}});
    j["levels"] = levels;
    return j;
}

std::string DependenceGraph::to_dot(const std::vector<std::vector<Int>>& levels) const {
    std::ostringstream os;
    os << "digraph dependences {\n  rankdir=TB;\n";
    for (size_t l = 0; l < levels.size(); ++l) {
        os << "  { rank=same;";
        for (Int v : levels[l]) os << " " << v << ";";
        os << " }  // level " << l << "\n";
    }
    for (const auto& [e, rels] : edges) os << "  " << e.first << " -> " << e.second << ";\n";
    os << "}\n";
    return os.str();
}

std::vector<std::vector<Int>> wavefronts(const DependenceGraph& g) {
    std::vector<size_t> level(static_cast<size_t>(g.n), 0);
    // edges point from smaller to larger index, so index order is topological
    for (const auto& [e, rels] : g.edges) {
        if (e.first == e.second) throw std::invalid_argument("self dependence on " + std::to_string(e.first));
        if (e.first < 0 || e.second >= g.n) throw std::out_of_range("edge outside 0..n-1");
    }
    for (const auto& [e, rels] : g.edges)  // sorted by source, so sources are final
        level[static_cast<size_t>(e.second)] =
            std::max(level[static_cast<size_t>(e.second)], level[static_cast<size_t>(e.first)] + 1);
    std::vector<std::vector<Int>> out;
    for (Int v = 0; v < g.n; ++v) {
        size_t l = level[static_cast<size_t>(v)];
        if (out.size() <= l) out.resize(l + 1);
        out[l].push_back(v);
    }
    return out;
}

bool valid_wavefronts(const DependenceGraph& g, const std::vector<std::vector<Int>>& levels) {
    std::vector<int> at(static_cast<size_t>(g.n), -1);
    for (size_t l = 0; l < levels.size(); ++l)
        for (Int v : levels[l]) {
            if (v < 0 || v >= g.n || at[static_cast<size_t>(v)] >= 0) return false;
            at[static_cast<size_t>(v)] = static_cast<int>(l);
        }
    if (std::count(at.begin(), at.end(), -1)) return false;
    for (const auto& [e, rels] : g.edges)
        if (at[static_cast<size_t>(e.first)] >= at[static_cast<size_t>(e.second)]) return false;
    return true;
}

}  // namespace sparsedep
