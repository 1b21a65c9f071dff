#include "sparsedep/constraint_store.hpp"

#include <algorithm>

namespace sparsedep {

DifferenceGraph::DifferenceGraph() {
    names_.push_back("");
    index_[""] = 0;
    dist_.assign(1, std::vector<Int>(1, 0));
}

size_t DifferenceGraph::node(const std::string& var) {
    auto it = index_.find(var);
    if (it != index_.end()) return it->second;
    size_t k = names_.size();
    names_.push_back(var);
    index_[var] = k;
    for (auto& row : dist_) row.push_back(kInf);
    dist_.push_back(std::vector<Int>(k + 1, kInf));
    dist_[k][k] = 0;
    return k;
}

std::optional<size_t> DifferenceGraph::find(const std::string& var) const {
    if (var.empty()) return 0;
    auto it = index_.find(var);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool DifferenceGraph::add_edge(size_t from, size_t to, Int w) {
    if (!feasible_) return false;
    if (dist_[from][to] <= w) return true;
    if (dist_[to][from] < kInf && dist_[to][from] + w < 0) {
        feasible_ = false;
        return false;
    }
    const size_t n = names_.size();
    std::vector<Int> into(n), out(n);
    for (size_t a = 0; a < n; ++a) into[a] = dist_[a][from];
    for (size_t b = 0; b < n; ++b) out[b] = dist_[to][b];
    for (size_t a = 0; a < n; ++a) {
        if (into[a] >= kInf) continue;
        Int base = into[a] + w;
        auto& row = dist_[a];
        for (size_t b = 0; b < n; ++b) {
            if (out[b] >= kInf) continue;
            Int d = base + out[b];
            if (d < row[b]) row[b] = d;
        }
    }
    return true;
}

std::optional<std::vector<DifferenceEdge>> as_difference(const Constraint& c) {
    const auto& t = c.expr.terms();
    Int k = c.expr.constant();
    std::string plus, minus;
    if (t.size() == 1 && (t[0].coef == 1 || t[0].coef == -1)) {
        (t[0].coef == 1 ? plus : minus) = t[0].atom.name();
    } else if (t.size() == 2 && t[0].coef == -t[1].coef && (t[0].coef == 1 || t[0].coef == -1)) {
        plus = t[0].coef == 1 ? t[0].atom.name() : t[1].atom.name();
        minus = t[0].coef == 1 ? t[1].atom.name() : t[0].atom.name();
    } else {
        return std::nullopt;
    }
    for (const auto& term : t)
        if (term.atom.is_call()) return std::nullopt;
    // plus - minus + k >= 0  <=>  minus - plus <= k
    std::vector<DifferenceEdge> out{{plus, minus, k}};
    if (c.is_eq()) out.push_back({minus, plus, -k});
    return out;
}

ConstraintStore::ConstraintStore(const Conjunction& c, CheckOptions opts) : opts_(opts) { add(c); }

void ConstraintStore::add(const Constraint& raw) {
    Constraint c = normalize(raw);
    if (all_.contains(c)) return;
    all_.add(c);
    dirty_ = true;
    if (auto t = c.truth()) {
        if (!*t) graph_.add_edge(0, 0, -1);
        return;
    }
    if (auto edges = as_difference(c)) {
        for (const auto& e : *edges) graph_.add_edge(graph_.node(e.from), graph_.node(e.to), e.w);
    } else {
        general_ = true;
        for (const auto& term : c.expr.terms()) graph_.node(term.atom.name());
    }
}

void ConstraintStore::add(const Conjunction& c) {
    for (const auto& x : c.constraints()) add(x);
}

LinearSystem ConstraintStore::linear() const {
    LinearSystem ls;
    for (const auto& c : all_.constraints()) ls.add(c);
    return ls;
}

void ConstraintStore::refresh() const {
    if (!dirty_) return;
    cached_ = check(linear(), opts_);
    dirty_ = false;
}

bool ConstraintStore::unsat() const {
    if (!graph_.feasible()) return true;
    if (!general_) return false;
    refresh();
    return cached_->unsat();
}

bool ConstraintStore::capped() const {
    if (!general_ || !graph_.feasible()) return false;
    refresh();
    return cached_->status == SatStatus::Unknown;
}

bool ConstraintStore::entails(const Constraint& raw) const {
    if (!graph_.feasible()) return true;
    Constraint c = normalize(raw);
    if (auto t = c.truth()) return *t || unsat();
    if (all_.contains(c)) return true;
    if (auto edges = as_difference(c)) {
        bool known = true;
        bool all = true;
        for (const auto& e : *edges) {
            auto from = graph_.find(e.from);
            auto to = graph_.find(e.to);
            if (!from || !to) {
                known = false;
                all = false;
                break;
            }
            if (graph_.dist(*from, *to) > e.w) all = false;
        }
        if (all) return true;
        if (!general_ && known) return false;
        if (!general_) {
            // unseen variable: entailed only if infeasible
            return false;
        }
    }
    if (!general_ && !as_difference(c)) {
        // difference system, general query
        return sparsedep::entails(linear(), c, opts_);
    }
    if (unsat()) return true;
    return sparsedep::entails(linear(), c, opts_);
}

bool ConstraintStore::entails(const Conjunction& c) const {
    for (const auto& x : c.constraints())
        if (!entails(x)) return false;
    return true;
}

std::vector<Constraint> ConstraintStore::implied_equalities() const {
    std::vector<Constraint> out;
    if (unsat()) return out;
    if (general_) {
        for (const auto& c : sparsedep::implied_equalities(linear())) out.push_back(c);
        return out;
    }
    const size_t n = graph_.size();
    std::vector<long> rep(n, -1);
    for (size_t a = 0; a < n; ++a) {
        if (rep[a] >= 0) continue;
        rep[a] = static_cast<long>(a);
        for (size_t b = a + 1; b < n; ++b) {
            if (rep[b] >= 0) continue;
            Int ab = graph_.dist(a, b);
            Int ba = graph_.dist(b, a);
            if (ab >= DifferenceGraph::kInf || ba >= DifferenceGraph::kInf || ab + ba != 0) continue;
            rep[b] = static_cast<long>(a);
            // x_b - x_a = ab
            AffineExpr e(Atom::iterator(graph_.name(b)));
            if (a != 0) e -= AffineExpr(Atom::iterator(graph_.name(a)));
            e -= ab;
            Constraint eq = normalize(Constraint::eq(e));
            if (!all_.contains(eq)) out.push_back(eq);
        }
    }
    return out;
}

}  // namespace sparsedep
