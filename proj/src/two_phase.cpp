#include "sparsedep/two_phase.hpp"

#include <algorithm>
#include <numeric>

namespace sparsedep {

namespace {

// Negations of one antecedent constraint (an equality splits in two).
std::vector<Constraint> negations(const Constraint& c) {
    if (c.is_eq()) return {normalize(Constraint::geq(c.expr - 1)), normalize(Constraint::geq(-c.expr - 1))};
    return {normalize(negate_geq(c))};
}

bool refuted(const ConstraintStore& store, const Constraint& c) {
    for (const auto& n : negations(c))
        if (!store.entails(n)) return false;
    return !negations(c).empty();
}

bool any_refuted(const ConstraintStore& store, const Conjunction& c) {
    for (const auto& x : c.constraints()) {
        if (x.is_eq()) {
            if (store.entails(Constraint::geq(x.expr - 1)) || store.entails(Constraint::geq(-x.expr - 1))) return true;
        } else if (store.entails(negate_geq(x))) {
            return true;
        }
    }
    return false;
}

struct Branch {
    Conjunction add;
};

struct Search {
    const std::vector<EncodedInstance>& inst;
    size_t budget;
    bool capped = false;
    std::vector<char> split_on;

    // Live branches of an instance under the store; sets satisfied when a
    // branch is already entailed.
    std::vector<Branch> branches(const ConstraintStore& store, size_t k, bool& satisfied) const {
        satisfied = false;
        std::vector<Branch> out;
        const auto& in = inst[k];
        for (const auto& a : in.antecedent.constraints()) {
            for (const auto& n : negations(a)) {
                if (store.entails(n)) {
                    satisfied = true;
                    return {};
                }
                if (store.entails(Constraint::geq(-n.expr - 1)) && !n.is_eq()) continue;  // n refuted
                Branch b;
                b.add.add(n);
                out.push_back(std::move(b));
            }
        }
        if (store.entails(in.consequent)) {
            satisfied = true;
            return {};
        }
        if (!any_refuted(store, in.consequent)) out.push_back(Branch{in.consequent});
        return out;
    }

    // true when every case is UNSAT
    bool refute(ConstraintStore store, std::vector<size_t> open) {
        if (budget == 0) {
            capped = true;
            return false;
        }
        --budget;
        // unit propagation
        bool changed = true;
        while (changed) {
            changed = false;
            if (store.unsat()) return true;
            std::vector<size_t> rest;
            for (size_t k : open) {
                bool sat = false;
                auto br = branches(store, k, sat);
                if (sat) continue;
                if (br.empty()) {
                    split_on[k] = 1;
                    return true;
                }
                if (br.size() == 1) {
                    split_on[k] = 1;
                    store.add(br[0].add);
                    changed = true;
                    continue;
                }
                rest.push_back(k);
            }
            open = std::move(rest);
        }
        if (store.unsat()) return true;
        if (open.empty()) return false;
        size_t pick = open.front();
        bool sat = false;
        auto br = branches(store, pick, sat);
        std::vector<size_t> rest(open.begin() + 1, open.end());
        for (const auto& b : br) {
            ConstraintStore next = store;
            next.add(b.add);
            if (!refute(next, rest)) return false;
        }
        split_on[pick] = 1;
        return true;
    }
};

}  // namespace

TwoPhaseResult apply_two_phase(const Conjunction& system, const std::vector<EncodedInstance>& instances,
                               const TwoPhaseOptions& opts) {
    TwoPhaseResult res;
    ConstraintStore store(system);
    std::vector<char> done(instances.size(), 0);
    auto finish_unsat = [&](bool phase1) {
        res.unsat = true;
        res.unsat_phase1 = phase1;
        res.augmented = store.constraints();
        return res;
    };
    if (store.unsat()) return finish_unsat(true);

    for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
        bool changed = false;
        for (size_t k = 0; k < instances.size(); ++k) {
            if (done[k]) continue;
            const auto& in = instances[k];
            if (store.entails(in.antecedent)) {
                done[k] = 1;
                if (store.entails(in.consequent)) {
                    res.trace.push_back({in.text, "satisfied"});
                    continue;
                }
                store.add(in.consequent);
                res.used.push_back(k);
                res.trace.push_back({in.text, "fired"});
                changed = true;
                if (store.unsat()) return finish_unsat(true);
                continue;
            }
            if (in.antecedent.size() == 1 && !in.antecedent.constraints()[0].is_eq() &&
                any_refuted(store, in.consequent)) {
                done[k] = 1;
                store.add(negate_geq(in.antecedent.constraints()[0]));
                res.used.push_back(k);
                res.trace.push_back({in.text, "contrapositive"});
                changed = true;
                if (store.unsat()) return finish_unsat(true);
                continue;
            }
            bool sat = store.entails(in.consequent);
            for (const auto& a : in.antecedent.constraints())
                if (sat || refuted(store, a)) {
                    sat = true;
                    break;
                }
            if (sat) {
                done[k] = 1;
                res.trace.push_back({in.text, "satisfied"});
            }
        }
        if (store.capped()) res.capped = true;
        if (!changed) break;
    }
    res.augmented = store.constraints();

    std::vector<size_t> open;
    for (size_t k = 0; k < instances.size(); ++k)
        if (!done[k]) open.push_back(k);
    std::stable_sort(open.begin(), open.end(), [&](size_t a, size_t b) {
        return instances[a].antecedent.size() < instances[b].antecedent.size();
    });
    if (!opts.phase2) {
        res.pending = open;
        return res;
    }
    if (open.size() > opts.max_disjunctive) {
        for (size_t k = opts.max_disjunctive; k < open.size(); ++k)
            res.trace.push_back({instances[open[k]].text, "dropped"});
        open.resize(opts.max_disjunctive);
    }
    res.pending = open;
    if (open.empty()) return res;
    Search search{instances, opts.node_budget, false, std::vector<char>(instances.size(), 0)};
    bool unsat = search.refute(store, open);
    if (search.capped) res.capped = true;
    if (unsat) {
        res.unsat = true;
        for (size_t k = 0; k < instances.size(); ++k)
            if (search.split_on[k]) {
                res.used.push_back(k);
                res.trace.push_back({instances[k].text, "split"});
            }
    }
    return res;
}

}  // namespace sparsedep
