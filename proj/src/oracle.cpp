#include "sparsedep/oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

namespace sparsedep {

EnumerationStats& EnumerationStats::operator+=(const EnumerationStats& o) {
    points += o.points;
    solutions += o.solutions;
    undefined += o.undefined;
    fallback = fallback || o.fallback;
    return *this;
}

namespace {

using Mask = std::uint64_t;

struct Prepared {
    CompiledConstraint c;
    Mask reads = 0;
    Mask args = 0;
};

Mask bit(int s) { return Mask{1} << s; }

// values of constraint c bound v to, given the rest is evaluable
struct Range {
    std::optional<Int> lo, hi;
    bool empty = false;
    bool undefined = false;
};

void tighten(Range& r, const CompiledConstraint& c, int v, Int* vals) {
    const Int a = c.expr.coefficient(v);
    if (a == 0) return;
    const Int saved = vals[v];
    vals[v] = 0;
    Int rest;
    bool ok = c.expr.eval(vals, rest);
    vals[v] = saved;
    if (!ok) {
        r.undefined = true;
        return;
    }
    // a*v + rest >= 0 (or = 0)
    auto lower = [&](Int x) { r.lo = r.lo ? std::max(*r.lo, x) : x; };
    auto upper = [&](Int x) { r.hi = r.hi ? std::min(*r.hi, x) : x; };
    if (c.eq) {
        if (rest % a != 0) {
            r.empty = true;
            return;
        }
        lower(-rest / a);
        upper(-rest / a);
    } else if (a > 0) {
        lower(ceil_div(-rest, a));
    } else {
        upper(floor_div(rest, -a));
    }
    if (r.lo && r.hi && *r.lo > *r.hi) r.empty = true;
}

class Search {
public:
    Search(const Relation& r, size_t clause, const ConcreteInstance& inst, const std::vector<UFSymbol>& ufs,
           const std::function<void(const std::vector<Int>&)>& visit, const EnumerationLimits& limits)
        : visit_(visit), limits_(limits) {
        Binder b(inst, ufs, r.iterators());
        n_ = b.slots().size();
        if (n_ > 63) throw std::invalid_argument(r.name + ": too many iterators to enumerate");
        for (const auto& c : r.clauses.at(clause).constraints()) {
            Prepared p;
            p.c = b.compile(c);
            for (int s : p.c.expr.reads()) {
                p.reads |= bit(s);
                if (p.c.expr.in_args(s)) p.args |= bit(s);
            }
            cs_.push_back(std::move(p));
        }
        Int nnz = 0;
        if (auto it = inst.constants.find("nnz"); it != inst.constants.end()) nnz = it->second;
        for (const auto& [name, arr] : inst.arrays) nnz = std::max<Int>(nnz, static_cast<Int>(arr.size()));
        box_ = 2 * nnz;
        vals_.assign(n_, 0);
    }

    EnumerationStats run() {
        // constant constraints
        for (const auto& p : cs_)
            if (p.reads == 0 && !holds(p)) return stats_;
        descend(0);
        return stats_;
    }

private:
    bool holds(const Prepared& p) {
        Int v;
        if (!p.c.expr.eval(vals_.data(), v)) {
            ++stats_.undefined;
            return false;
        }
        return p.c.eq ? v == 0 : v >= 0;
    }

    void descend(Mask assigned) {
        if (assigned == (n_ == 64 ? ~Mask{0} : bit(static_cast<int>(n_)) - 1)) {
            ++stats_.solutions;
            visit_(vals_);
            return;
        }
        // pick the unassigned iterator with the narrowest known range
        int pick = -1;
        Range best;
        Int best_width = std::numeric_limits<Int>::max();
        int best_known = -1;
        for (size_t v = 0; v < n_; ++v) {
            if (assigned & bit(static_cast<int>(v))) continue;
            Range r;
            const Mask others = ~assigned & ~bit(static_cast<int>(v));
            for (const auto& p : cs_) {
                if (!(p.reads & bit(static_cast<int>(v))) || (p.args & bit(static_cast<int>(v))) ||
                    (p.reads & others))
                    continue;
                tighten(r, p.c, static_cast<int>(v), vals_.data());
                if (r.undefined) {
                    ++stats_.undefined;
                    return;
                }
                if (r.empty) return;
            }
            const int known = (r.lo ? 1 : 0) + (r.hi ? 1 : 0);
            Int width = known == 2 ? *r.hi - *r.lo : std::numeric_limits<Int>::max();
            if (known > best_known || (known == best_known && width < best_width)) {
                pick = static_cast<int>(v);
                best = r;
                best_width = width;
                best_known = known;
            }
        }
        Int lo = best.lo.value_or(-box_), hi = best.hi.value_or(box_);
        if (best_known < 2) {
            stats_.fallback = true;
            lo = std::max(lo, -box_);
            hi = std::min(hi, box_);
        }
        const Mask now = assigned | bit(pick);
        for (Int x = lo; x <= hi; ++x) {
            if (++stats_.points > limits_.max_points)
                throw EnumerationCapExceeded("enumeration exceeded " + std::to_string(limits_.max_points) + " points");
            vals_[static_cast<size_t>(pick)] = x;
            bool ok = true;
            for (const auto& p : cs_) {
                if (!(p.reads & bit(pick)) || (p.reads & ~now)) continue;
                if (!holds(p)) {
                    ok = false;
                    break;
                }
            }
            if (ok) descend(now);
        }
        vals_[static_cast<size_t>(pick)] = 0;
    }

    const std::function<void(const std::vector<Int>&)>& visit_;
    EnumerationLimits limits_;
    size_t n_ = 0;
    std::vector<Prepared> cs_;
    std::vector<Int> vals_;
    Int box_ = 0;
    EnumerationStats stats_;
};

std::string point_text(const std::vector<std::string>& names, const std::vector<Int>& vals) {
    std::ostringstream os;
    for (size_t k = 0; k < names.size(); ++k) os << (k ? ", " : "") << names[k] << "=" << vals[k];
    return os.str();
}

}  // namespace

EnumerationStats enumerate_clause(const Relation& r, size_t clause, const ConcreteInstance& inst,
                                  const std::vector<UFSymbol>& ufs,
                                  const std::function<void(const std::vector<Int>&)>& visit,
                                  const EnumerationLimits& limits) {
    return Search(r, clause, inst, ufs, visit, limits).run();
}

EdgeSet dependence_pairs(const Relation& r, const ConcreteInstance& inst, const std::vector<UFSymbol>& ufs,
                         const EnumerationLimits& limits, EnumerationStats* stats) {
    EdgeSet out;
    const auto its = r.iterators();
    const size_t src = static_cast<size_t>(std::find(its.begin(), its.end(), r.in_outer()) - its.begin());
    const size_t dst = static_cast<size_t>(std::find(its.begin(), its.end(), r.out_outer()) - its.begin());
    for (size_t c = 0; c < r.clauses.size(); ++c) {
        auto s = enumerate_clause(
            r, c, inst, ufs, [&](const std::vector<Int>& v) { out.emplace(v[src], v[dst]); }, limits);
        if (stats) *stats += s;
    }
    return out;
}

EdgeSet unordered(const EdgeSet& pairs) {
    EdgeSet out;
    for (const auto& [a, b] : pairs) out.emplace(std::min(a, b), std::max(a, b));
    return out;
}

nlohmann::json OracleReport::to_json() const {
    nlohmann::json j;
    j["problem"] = problem;
    j["preset"] = preset;
    j["instances"] = instances;
    j["checks"] = checks;
    j["points"] = stats.points;
    j["solutions"] = stats.solutions;
    j["undefined_prefixes"] = stats.undefined;
    j["fallback_box"] = stats.fallback;
    j["counterexamples"] = nlohmann::json::array();
    for (const auto& c : counterexamples)
        j["counterexamples"].push_back(
            {{"kind", c.kind}, {"relation", c.relation}, {"detail", c.detail}, {"instance", c.instance}});
    j["warnings"] = warnings;
    return j;
}

OracleReport falsify(const Problem& p, const std::vector<Verdict>& verdicts,
                     const std::vector<SupersetClaim>& claims, const std::vector<ConcreteInstance>& instances,
                     const EnumerationLimits& limits) {
    std::map<std::string, const Verdict*> by_name;
    for (const auto& v : verdicts) by_name[v.relation] = &v;
    std::set<std::string> in_claims;
    for (const auto& c : claims) {
        in_claims.insert(c.superset);
        in_claims.insert(c.subset);
    }

    std::vector<OracleReport> parts(instances.size());
    parallel_for(instances.size(), [&](size_t k) {
        const ConcreteInstance& inst = instances[k];
        OracleReport& out = parts[k];
        out.instances = 1;
        auto bad = validate(inst, p.assertions, p.ufs);
        if (!bad.empty()) {
            out.counterexamples.push_back({"instance", "", bad.front(), inst.to_json()});
            return;
        }
        std::map<std::string, EdgeSet> pairs;
        for (const auto& r : p.relations) {
            auto vit = by_name.find(r.name);
            const Verdict* v = vit == by_name.end() ? nullptr : vit->second;
            const bool want_pairs = in_claims.count(r.name) > 0;
            if (!v && !want_pairs) continue;
            const auto its = r.iterators();
            const size_t src = static_cast<size_t>(std::find(its.begin(), its.end(), r.in_outer()) - its.begin());
            const size_t dst = static_cast<size_t>(std::find(its.begin(), its.end(), r.out_outer()) - its.begin());
            Binder b(inst, p.ufs, its);
            EdgeSet& rp = pairs[r.name];
            for (size_t c = 0; c < r.clauses.size(); ++c) {
                const ClauseVerdict* cv = v && c < v->clauses.size() ? &v->clauses[c] : nullptr;
                const bool unsat = (cv && cv->unsat) || (v && v->unsat());
                std::vector<CompiledConstraint> eqs;
                if (cv)
                    for (const auto& e : cv->equalities) eqs.push_back(b.compile(e));
                if (!unsat && eqs.empty() && !want_pairs) continue;
                out.checks += (unsat ? 1 : 0) + eqs.size();
                bool reported_unsat = false;
                std::vector<bool> reported_eq(eqs.size(), false);
                size_t undefined_eq = 0;
                try {
                    out.stats += enumerate_clause(
                        r, c, inst, p.ufs,
                        [&](const std::vector<Int>& vals) {
                            rp.emplace(vals[src], vals[dst]);
                            if (unsat && !reported_unsat) {
                                reported_unsat = true;
                                out.counterexamples.push_back({"unsat", r.name,
                                                               "clause " + std::to_string(c) + " holds at " +
                                                                   point_text(its, vals),
                                                               inst.to_json()});
                            }
                            for (size_t e = 0; e < eqs.size(); ++e) {
                                Int x;
                                if (!eqs[e].expr.eval(vals.data(), x)) {
                                    ++undefined_eq;
                                    continue;
                                }
                                if (x != 0 && !reported_eq[e]) {
                                    reported_eq[e] = true;
                                    out.counterexamples.push_back(
                                        {"equality", r.name,
                                         eqs[e].source.to_string() + " fails at " + point_text(its, vals),
                                         inst.to_json()});
                                }
                            }
                        },
                        limits);
                } catch (const EnumerationCapExceeded& e) {
                    out.warnings.push_back(r.name + " clause " + std::to_string(c) + " seed " +
                                           std::to_string(inst.seed) + ": " + e.what());
                }
                if (undefined_eq)
                    out.warnings.push_back(r.name + ": equality left an array at " + std::to_string(undefined_eq) +
                                           " points (seed " + std::to_string(inst.seed) + ")");
            }
        }
        for (const auto& cl : claims) {
            ++out.checks;
            const EdgeSet& sup = pairs[cl.superset];
            for (auto [a, b] : pairs[cl.subset]) {
                if (cl.mirrored) std::swap(a, b);
                if (sup.count({a, b})) continue;
                out.counterexamples.push_back({"superset", cl.subset,
                                               "(" + std::to_string(a) + ", " + std::to_string(b) + ") is not in " +
                                                   cl.superset,
                                               inst.to_json()});
                break;
            }
        }
    });

    OracleReport report;
    report.problem = p.path;
    report.preset = instances.empty() ? p.preset : instances.front().preset;
    for (auto& part : parts) {
        report.instances += part.instances;
        report.checks += part.checks;
        report.stats += part.stats;
        for (auto& c : part.counterexamples) report.counterexamples.push_back(std::move(c));
        for (auto& w : part.warnings) report.warnings.push_back(std::move(w));
    }
    if (report.stats.fallback)
        report.warnings.push_back("some iterator had no finite bound; searched [-2nnz, 2nnz]");
    return report;
}

namespace {

Verdict claimed_unsat(const Relation& r) {
    Verdict v;
    v.relation = r.name;
    v.kernel = r.kernel();
    v.status = VerdictStatus::UnsatAffine;
    v.clauses.resize(r.clauses.size());
    for (auto& c : v.clauses) c.unsat = c.unsat_affine = true;
    return v;
}

}  // namespace

std::vector<std::string> oracle_self_test(const Problem& p, const std::vector<ConcreteInstance>& instances,
                                          std::vector<std::string>* skipped, const EnumerationLimits& limits) {
    std::vector<std::string> missed;
    auto skip = [&](const std::string& what) {
        if (skipped) skipped->push_back(what);
    };
    // pairs per relation, summed over instances
    std::vector<std::vector<EdgeSet>> pairs(p.relations.size());
    for (size_t r = 0; r < p.relations.size(); ++r)
        for (const auto& inst : instances) pairs[r].push_back(dependence_pairs(p.relations[r], inst, p.ufs, limits));
    auto nonempty = [&](size_t r) {
        for (const auto& s : pairs[r])
            if (!s.empty()) return true;
        return false;
    };

    std::optional<size_t> live;
    for (size_t r = 0; r < p.relations.size() && !live; ++r)
        if (nonempty(r)) live = r;
    if (!live) {
        skip("unsat: no relation has points on these instances");
        skip("equality: no relation has points on these instances");
    } else {
        const Relation& rel = p.relations[*live];
        if (falsify(p, {claimed_unsat(rel)}, {}, instances, limits).ok())
            missed.push_back("satisfiable " + rel.name + " declared UNSAT was not refuted");
        Verdict v;
        v.relation = rel.name;
        v.clauses.resize(rel.clauses.size());
        // outer iterators are ordered in every dependence relation, so this fails
        Constraint wrong = Constraint::equal(AffineExpr(Atom::iterator(rel.in_outer())),
                                             AffineExpr(Atom::iterator(rel.out_outer())));
        for (auto& c : v.clauses) c.equalities.push_back(wrong);
        if (falsify(p, {v}, {}, instances, limits).ok())
            missed.push_back("false equality " + wrong.to_string() + " on " + rel.name + " was not refuted");
    }

    std::optional<SupersetClaim> reversed;
    for (size_t a = 0; a < p.relations.size() && !reversed; ++a) {
        for (size_t b = 0; b < p.relations.size() && !reversed; ++b) {
            if (a == b) continue;
            for (size_t k = 0; k < instances.size(); ++k) {
                bool escapes = std::any_of(pairs[a][k].begin(), pairs[a][k].end(),
                                           [&](const auto& e) { return !pairs[b][k].count(e); });
                if (!escapes) continue;
                SupersetClaim c;
                c.superset = p.relations[b].name;
                c.subset = p.relations[a].name;
                c.note = "corrupted";
                reversed = c;
                break;
            }
        }
    }
    if (!reversed) {
        skip("superset: no relation escapes another on these instances");
    } else if (falsify(p, {}, {*reversed}, instances, limits).ok()) {
        missed.push_back("false claim " + reversed->superset + " contains " + reversed->subset + " was not refuted");
    }
    return missed;
}

}  // namespace sparsedep
