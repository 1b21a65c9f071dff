#include "sparsedep/superset.hpp"

#include "sparsedep/constraint_store.hpp"
#include "sparsedep/encoding.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <set>

namespace sparsedep {

std::string to_string(SupersetRule r) { return r == SupersetRule::Trivial ? "TRIVIAL" : "OVERLAP"; }

namespace {

Constraint untag(const Constraint& c) { return Constraint{c.kind, c.expr, Tag::Exact}; }

std::set<Constraint> constraint_set(const Conjunction& c, const std::vector<Constraint>& extra) {
    std::set<Constraint> out;
    for (const auto& x : c.constraints()) out.insert(untag(x));
    for (const auto& x : extra) out.insert(untag(normalize(x)));
    return out;
}

std::set<std::string> iterators_of(const Constraint& c) {
    std::set<std::string> out;
    c.expr.collect_iterators(out);
    return out;
}

// Search iterator maps r1 -> r2 (outer iterators fixed, crossed when
// mirrored) under which every constraint of c1 except at most
// allowed_misses lands in target. `accept` sees each
// complete map together with the constraints that missed.
bool search_maps(const Relation& r1, const Relation& r2, const Conjunction& c1, const std::set<Constraint>& target,
                 size_t allowed_misses, bool mirrored,
                 const std::function<bool(const std::map<std::string, std::string>&,
                                          const std::vector<Constraint>&)>& accept) {
    std::vector<std::string> used1;
    {
        std::set<std::string> seen;
        for (const auto& c : c1.constraints())
            for (const auto& it : iterators_of(c)) seen.insert(it);
        for (const auto& it : r1.iterators())
            if (seen.count(it)) used1.push_back(it);
    }
    std::map<std::string, std::string> map;
    std::set<std::string> taken;
    map[r1.in_outer()] = mirrored ? r2.out_outer() : r2.in_outer();
    map[r1.out_outer()] = mirrored ? r2.in_outer() : r2.out_outer();
    taken.insert(r2.in_outer());
    taken.insert(r2.out_outer());
    std::vector<std::string> free1;
    for (const auto& it : used1)
        if (!map.count(it)) free1.push_back(it);
    std::vector<std::string> cand2;
    for (const auto& it : r2.iterators())
        if (!taken.count(it)) cand2.push_back(it);

    // constraints become checkable once all their iterators are mapped
    std::vector<std::pair<Constraint, std::set<std::string>>> cons;
    for (const auto& c : c1.constraints()) cons.push_back({untag(c), iterators_of(c)});

    std::function<bool(size_t, size_t)> rec = [&](size_t k, size_t misses) -> bool {
        // check constraints completed by the latest assignment
        std::vector<Constraint> missed;
        size_t count = 0;
        for (const auto& [c, its] : cons) {
            bool ready = true;
            for (const auto& it : its)
                if (!map.count(it)) ready = false;
            if (!ready) continue;
            Constraint rc = untag(rename(c, map));
            if (!target.count(rc)) {
                missed.push_back(c);
                ++count;
            }
        }
        if (count > allowed_misses) return false;
        if (k == free1.size()) return accept(map, missed);
        for (const auto& cand : cand2) {
            if (taken.count(cand)) continue;
            map[free1[k]] = cand;
            taken.insert(cand);
            if (rec(k + 1, misses)) return true;
            taken.erase(cand);
            map.erase(free1[k]);
        }
        return false;
    };
    return rec(0, 0);
}

bool is_iter_equality(const Constraint& c, const Relation& r, std::string& a, std::string& b) {
    if (!c.is_eq() || c.expr.constant() != 0 || c.expr.terms().size() != 2) return false;
    const auto& t = c.expr.terms();
    if (t[0].coef != -t[1].coef || (t[0].coef != 1 && t[0].coef != -1)) return false;
    if (t[0].atom.kind() != AtomKind::Iterator || t[1].atom.kind() != AtomKind::Iterator) return false;
    if (!r.is_iterator(t[0].atom.name()) || !r.is_iterator(t[1].atom.name())) return false;
    a = t[0].atom.name();
    b = t[1].atom.name();
    return true;
}

std::optional<SupersetClaim> trivial_superset(const SupersetInput& in1, const SupersetInput& in2, bool mirrored) {
    const Relation& r1 = *in1.relation;
    const Relation& r2 = *in2.relation;
    SupersetClaim claim;
    claim.superset = r1.name;
    claim.subset = r2.name;
    claim.rule = SupersetRule::Trivial;
    claim.mirrored = mirrored;
    // every clause of r2 must be covered by some clause of r1
    for (size_t c2 = 0; c2 < r2.clauses.size(); ++c2) {
        std::vector<Constraint> extra = c2 < in2.equalities.size() ? in2.equalities[c2] : std::vector<Constraint>{};
        auto target = constraint_set(r2.clauses[c2], extra);
        bool covered = false;
        for (const auto& c1 : r1.clauses) {
            covered = search_maps(r1, r2, c1, target, 0, mirrored, [&](const auto& map, const auto&) {
                if (claim.mapping.empty()) claim.mapping = map;
                return true;
            });
            if (covered) break;
        }
        if (!covered) return std::nullopt;
    }
    return claim;
}

std::optional<SupersetClaim> overlap_superset(const SupersetInput& in1, const SupersetInput& in2, bool mirrored);

}  // namespace

std::optional<SupersetClaim> trivial_superset(const SupersetInput& r1, const SupersetInput& r2) {
    if (auto c = trivial_superset(r1, r2, false)) return c;
    return trivial_superset(r1, r2, true);
}

std::optional<SupersetClaim> overlap_superset(const SupersetInput& r1, const SupersetInput& r2) {
    if (auto c = overlap_superset(r1, r2, false)) return c;
    return overlap_superset(r1, r2, true);
}

namespace {

std::optional<SupersetClaim> overlap_superset(const SupersetInput& in1, const SupersetInput& in2, bool mirrored) {
    const Relation& r1 = *in1.relation;
    const Relation& r2 = *in2.relation;
    if (r1.clauses.size() != 1 || r2.clauses.size() != 1) return std::nullopt;
    const Conjunction& c1 = r1.clauses[0];
    const Conjunction& c2 = r2.clauses[0];
    std::vector<Constraint> extra = in2.equalities.empty() ? std::vector<Constraint>{} : in2.equalities[0];
    auto target = constraint_set(c2, extra);
    Conjunction sub_system = c2;
    for (const auto& e : extra) sub_system.add(e);

    std::optional<SupersetClaim> result;
    search_maps(r1, r2, c1, target, 0x7fff, mirrored, [&](const std::map<std::string, std::string>& map,
                                               const std::vector<Constraint>& missed) {
        // step 1: the only constraints not in r2 are one equality k = m' and
        // bounds on m'
        std::vector<Constraint> eqs;
        for (const auto& m : missed) {
            std::string a, b;
            if (is_iter_equality(m, r1, a, b)) eqs.push_back(m);
        }
        for (const auto& e : eqs) {
            std::string a, b;
            is_iter_equality(e, r1, a, b);
            for (int side = 0; side < 2; ++side) {
                const std::string k = side == 0 ? a : b;   // shared side
                const std::string mp = side == 0 ? b : a;  // distinguished
                if (mp == r1.in_outer() || mp == r1.out_outer()) continue;
                // every other miss must mention m'
                bool shape = true;
                std::vector<Constraint> bounds;
                for (const auto& c : c1.constraints()) {
                    if (untag(c) == untag(e)) continue;
                    if (!iterators_of(c).count(mp)) continue;
                    bounds.push_back(c);
                }
                for (const auto& m : missed) {
                    if (untag(m) == untag(e)) continue;
                    if (!iterators_of(m).count(mp)) shape = false;
                }
                if (!shape) continue;
                // superset bounds must be exact
                bool exact = true;
                for (const auto& bnd : bounds)
                    if (bnd.tag == Tag::May) exact = false;
                if (!exact) continue;
                // step 2: k = l' in r2 with l' different from the image of m'
                const std::string k2 = map.at(k);
                for (const auto& c : c2.constraints()) {
                    std::string x, y;
                    if (!is_iter_equality(c, r2, x, y)) continue;
                    std::string lp;
                    if (x == k2) lp = y;
                    else if (y == k2) lp = x;
                    else continue;
                    if (lp == map.at(mp)) continue;
                    // steps 3-4: bounds on m' with m' -> l' are entailed by r2
                    auto rmap = map;
                    rmap[mp] = lp;
                    Encoding enc;
                    ConstraintStore store;
                    for (const auto& s : sub_system.constraints()) store.add(enc.encode(s));
                    bool all = true;
                    std::vector<std::string> shown;
                    for (const auto& bnd : bounds) {
                        Constraint moved = rename(bnd, rmap);
                        shown.push_back(moved.to_string());
                        if (!store.entails(enc.encode(moved))) {
                            all = false;
                            break;
                        }
                    }
                    if (!all) continue;
                    SupersetClaim claim;
                    claim.superset = r1.name;
                    claim.subset = r2.name;
                    claim.rule = SupersetRule::Overlap;
                    claim.mirrored = mirrored;
                    claim.mapping = rmap;
                    claim.missing_equality = e.to_string();
                    claim.similar_equality = c.to_string();
                    claim.bounds = shown;
                    claim.note = "bounds of " + mp + " moved to " + lp + " through one substitution";
                    result = claim;
                    return true;
                }
            }
        }
        return false;
    });
    return result;
}

}  // namespace

std::optional<SupersetClaim> find_superset(const SupersetInput& r1, const SupersetInput& r2) {
    if (auto c = trivial_superset(r1, r2)) return c;
    return overlap_superset(r1, r2);
}

Minimized minimize(const std::vector<SupersetInput>& checks, const std::vector<ComplexityExpr>& cost) {
    Minimized out;
    const size_t n = checks.size();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));  // reach[a][b]: a covers b
    for (size_t a = 0; a < n; ++a) {
        reach[a][a] = 1;
        for (size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            if (auto c = find_superset(checks[a], checks[b])) {
                reach[a][b] = 1;
                out.claims.push_back(*c);
            }
        }
    }
    for (size_t k = 0; k < n; ++k)
        for (size_t a = 0; a < n; ++a)
            if (reach[a][k])
                for (size_t b = 0; b < n; ++b)
                    if (reach[k][b]) reach[a][b] = 1;
    auto name = [&](size_t k) { return checks[k].relation->name; };
    auto better = [&](size_t a, size_t b) {  // a preferred over b
        int c = compare(cost[a], cost[b]);
        if (c != 0) return c < 0;
        return name(a) < name(b);
    };
    for (size_t b = 0; b < n; ++b) {
        // maximal: nobody covers b without b covering them back
        bool maximal = true;
        for (size_t a = 0; a < n; ++a)
            if (a != b && reach[a][b] && !reach[b][a]) maximal = false;
        bool rep = maximal;
        if (maximal)
            for (size_t a = 0; a < n; ++a)
                if (a != b && reach[a][b] && reach[b][a] && better(a, b)) rep = false;
        if (rep) out.kept.push_back(name(b));
    }
    for (size_t b = 0; b < n; ++b) {
        if (std::find(out.kept.begin(), out.kept.end(), name(b)) != out.kept.end()) continue;
        std::string by;
        for (size_t a = 0; a < n; ++a) {
            if (a == b || !reach[a][b]) continue;
            if (std::find(out.kept.begin(), out.kept.end(), name(a)) == out.kept.end()) continue;
            if (by.empty() || better(a, std::find_if(checks.begin(), checks.end(), [&](const auto& c) {
                                          return c.relation->name == by;
                                      }) - checks.begin()))
                by = name(a);
        }
        out.discarded[name(b)] = by;
    }
    return out;
}

nlohmann::json to_json(const SupersetClaim& c) {
    nlohmann::json j;
    j["superset"] = c.superset;
    j["subset"] = c.subset;
    j["rule"] = to_string(c.rule);
    j["mapping"] = c.mapping;
    j["mirrored"] = c.mirrored;
    if (c.rule == SupersetRule::Overlap) {
        j["missing_equality"] = c.missing_equality;
        j["similar_equality"] = c.similar_equality;
        j["bounds"] = c.bounds;
        j["note"] = c.note;
    }
    return j;
}

}  // namespace sparsedep
