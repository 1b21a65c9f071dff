#include "sparsedep/analysis.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace sparsedep {

std::string to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::UnsatAffine: return "UNSAT_AFFINE";
        case VerdictStatus::UnsatWithProperties: return "UNSAT_WITH_PROPERTIES";
        case VerdictStatus::MaybeSat: return "MAYBE_SAT";
        case VerdictStatus::UnknownCapped: return "UNKNOWN_CAPPED";
    }
    return "MAYBE_SAT";
}

PropertyConfig PropertyConfig::parse(const std::string& text) {
    PropertyConfig cfg;
    if (text == "none") {
        cfg.mode = Mode::None;
    } else if (text == "all") {
        cfg.mode = Mode::All;
    } else if (text.rfind("single:", 0) == 0) {
        cfg.mode = Mode::Single;
        cfg.category = text.substr(7);
        if (cfg.category.empty()) throw std::invalid_argument("empty property name in '" + text + "'");
    } else {
        throw std::invalid_argument("unknown property config '" + text + "' (none, all, single:<name>)");
    }
    return cfg;
}

std::string PropertyConfig::to_string() const {
    switch (mode) {
        case Mode::None: return "none";
        case Mode::All: return "all";
        case Mode::Single: return "single:" + category;
    }
    return "all";
}

bool PropertyConfig::enabled(const Assertion& a) const {
    switch (mode) {
        case Mode::None: return false;
        case Mode::All: return true;
        case Mode::Single: return a.category == category || a.name == category;
    }
    return false;
}

namespace {

std::string base_name(const std::string& assertion) {
    auto pos = assertion.find('#');
    return pos == std::string::npos ? assertion : assertion.substr(0, pos);
}

bool is_consistency(const EncodedInstance& in) { return in.name.rfind("consistency(", 0) == 0; }

// Union-find over variable names with integer offsets: value(x) = value(root) + off.
class OffsetUnion {
public:
    std::pair<std::string, Int> find(const std::string& x) const {
        std::string cur = x;
        Int off = 0;
        while (true) {
            auto it = parent_.find(cur);
            if (it == parent_.end()) return {cur, off};
            off += it->second.second;
            cur = it->second.first;
        }
    }
    bool same(const std::string& x, const std::string& y, Int diff) const {  // x - y = diff
        auto [rx, ox] = find(x);
        auto [ry, oy] = find(y);
        return rx == ry && ox - oy == diff;
    }
    bool unite(const std::string& x, const std::string& y, Int diff) {
        auto [rx, ox] = find(x);
        auto [ry, oy] = find(y);
        if (rx == ry) return false;
        parent_[rx] = {ry, oy + diff - ox};
        return true;
    }

private:
    std::map<std::string, std::pair<std::string, Int>> parent_;
};

// x - y = diff shape; y empty means a constant
bool difference_eq(const Constraint& c, std::string& x, std::string& y, Int& diff) {
    if (!c.is_eq()) return false;
    const auto& t = c.expr.terms();
    if (t.size() == 1 && (t[0].coef == 1 || t[0].coef == -1)) {
        x = t[0].atom.name();
        y.clear();
        diff = t[0].coef == 1 ? -c.expr.constant() : c.expr.constant();
        return true;
    }
    if (t.size() == 2 && t[0].coef == -t[1].coef && (t[0].coef == 1 || t[0].coef == -1)) {
        bool first = t[0].coef == 1;
        x = first ? t[0].atom.name() : t[1].atom.name();
        y = first ? t[1].atom.name() : t[0].atom.name();
        diff = -c.expr.constant();
        return true;
    }
    return false;
}

// Congruence: bindings of one unary symbol with equal arguments have equal
// values.
void close_congruence(OffsetUnion& uf, const Encoding& enc) {
    bool changed = true;
    const auto& bs = enc.bindings();
    while (changed) {
        changed = false;
        for (size_t a = 0; a < bs.size(); ++a) {
            for (size_t b = a + 1; b < bs.size(); ++b) {
                if (bs[a].term.name() != bs[b].term.name() || bs[a].args.size() != bs[b].args.size()) continue;
                bool equal = true;
                for (size_t k = 0; k < bs[a].args.size() && equal; ++k) {
                    Constraint eq = normalize(Constraint::eq(bs[a].args[k] - bs[b].args[k]));
                    if (auto t = eq.truth()) {
                        equal = *t;
                        continue;
                    }
                    std::string x, y;
                    Int d = 0;
                    if (!difference_eq(eq, x, y, d)) {
                        equal = false;
                        continue;
                    }
                    equal = uf.same(x, y.empty() ? std::string("$zero") : y, d);
                }
                if (equal && uf.unite(bs[a].var, bs[b].var, 0)) changed = true;
            }
        }
    }
}

struct Stage {
    TwoPhaseResult result;
    std::vector<EncodedInstance> instances;
};

std::vector<EncodedInstance> instantiate_all(Encoding& enc, const Conjunction& clause,
                                             const std::vector<Assertion>& assertions, const PropertyConfig& cfg,
                                             const InstanceBudget& budget, bool& truncated) {
    std::vector<EncodedInstance> out;
    const auto E = ground_terms(clause);
    for (const auto& a : assertions) {
        if (!cfg.enabled(a)) continue;
        Instantiation inst = instantiate(a, E, budget);
        if (inst.truncated) truncated = true;
        for (const auto& i : inst.instances) {
            bool vacuous = false;
            for (const auto& c : i.antecedent.constraints())
                if (c.truth() == std::optional<bool>(false)) vacuous = true;
            bool trivial = true;
            for (const auto& c : i.consequent.constraints())
                if (c.truth() != std::optional<bool>(true)) trivial = false;
            if (vacuous || trivial) continue;
            EncodedInstance e;
            e.name = a.name;
            e.text = a.name + ": " + i.to_string();
            e.antecedent = enc.encode(i.antecedent);
            e.consequent = enc.encode(i.consequent);
            out.push_back(std::move(e));
        }
    }
    for (auto& ob : enc.take_new_obligations()) out.push_back(std::move(ob));
    return out;
}

std::vector<Constraint> report_equalities(const Encoding& enc, const Conjunction& augmented,
                                          const Relation* rel) {
    ConstraintStore store(augmented);
    std::vector<Constraint> found = store.implied_equalities();
    OffsetUnion uf;
    for (const auto& c : enc.system().constraints()) {
        std::string x, y;
        Int d = 0;
        if (difference_eq(c, x, y, d)) uf.unite(x, y.empty() ? "$zero" : y, d);
    }
    close_congruence(uf, enc);
    auto involves_iterator = [&](const Constraint& c) {
        for (const auto& t : c.expr.terms())
            if (!enc.is_fresh(t.atom.name()) && (!rel || rel->is_iterator(t.atom.name()))) return true;
        return false;
    };
    std::vector<std::pair<int, Constraint>> ranked;
    for (const auto& c : found) ranked.push_back({involves_iterator(c) ? 0 : 1, c});
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second.to_string() < b.second.to_string();
    });
    std::vector<Constraint> out;
    for (const auto& [rank, c] : ranked) {
        std::string x, y;
        Int d = 0;
        if (!difference_eq(c, x, y, d)) continue;
        std::string yy = y.empty() ? "$zero" : y;
        if (uf.same(x, yy, d)) continue;
        uf.unite(x, yy, d);
        close_congruence(uf, enc);
        Constraint dec = enc.decode(c);
        // equalities among symbolic constants alone say nothing about iterations
        if (rel) {
            bool touches = false;
            for (const auto& t : dec.expr.terms()) {
                if (t.atom.is_call() || rel->is_iterator(t.atom.name())) touches = true;
            }
            if (!touches) continue;
        }
        out.push_back(dec);
    }
    return out;
}

ClauseVerdict analyze_clause(const Conjunction& clause, const Relation* rel, const std::vector<Assertion>& assertions,
                             const PropertyConfig& cfg, const AnalysisOptions& opts, Conjunction* augmented_out) {
    ClauseVerdict cv;
    Encoding enc(clause);
    // affine stage: clause plus functional consistency
    TwoPhaseResult affine = apply_two_phase(enc.system(), enc.pending(), opts.two_phase);
    if (affine.unsat) {
        cv.unsat_affine = cv.unsat = true;
        cv.certificate.push_back("affine + functional consistency");
        for (size_t k : affine.used) cv.certificate.push_back(enc.pending()[k].text);
        return cv;
    }
    Conjunction augmented = affine.augmented;
    cv.capped = affine.capped;
    if (cfg.mode != PropertyConfig::Mode::None) {
        bool truncated = false;
        std::vector<EncodedInstance> instances = enc.pending();
        auto extra = instantiate_all(enc, clause, assertions, cfg, opts.budget, truncated);
        instances.insert(instances.end(), extra.begin(), extra.end());
        cv.truncated = truncated;
        cv.instances = instances.size();
        TwoPhaseResult prop = apply_two_phase(enc.system(), instances, opts.two_phase);
        cv.capped = cv.capped || prop.capped;
        if (prop.unsat) {
            cv.unsat = true;
            cv.capped = false;
            // keep only the assertion groups the refutation needs
            std::vector<size_t> used = prop.used;
            std::set<std::string> groups;
            for (size_t k : used)
                if (!is_consistency(instances[k])) groups.insert(base_name(instances[k].name));
            for (const auto& g : std::set<std::string>(groups)) {
                std::vector<EncodedInstance> trial;
                for (size_t k : used)
                    if (is_consistency(instances[k]) || (groups.count(base_name(instances[k].name)) &&
                                                         base_name(instances[k].name) != g))
                        trial.push_back(instances[k]);
                if (apply_two_phase(enc.system(), trial, opts.two_phase).unsat) groups.erase(g);
            }
            cv.properties_used.assign(groups.begin(), groups.end());
            std::vector<size_t> kept;
            for (size_t k : used)
                if (is_consistency(instances[k]) || groups.count(base_name(instances[k].name))) kept.push_back(k);
            if (kept.size() <= 40) {
                for (size_t drop = kept.size(); drop-- > 0;) {
                    std::vector<EncodedInstance> trial;
                    for (size_t k = 0; k < kept.size(); ++k)
                        if (k != drop) trial.push_back(instances[kept[k]]);
                    if (apply_two_phase(enc.system(), trial, opts.two_phase).unsat)
                        kept.erase(kept.begin() + static_cast<long>(drop));
                }
            }
            used = kept;
            cv.certificate.push_back(prop.unsat_phase1 ? "phase 1" : "phase 2");
            for (size_t k : used) cv.certificate.push_back(instances[k].text);
            return cv;
        }
        augmented = prop.augmented;
    }
    if (augmented_out) *augmented_out = augmented;
    if (opts.equalities) cv.equalities = report_equalities(enc, augmented, rel);
    return cv;
}

}  // namespace

Verdict analyze(const Relation& r, const std::vector<Assertion>& assertions, const PropertyConfig& cfg,
                const AnalysisOptions& opts) {
    auto start = std::chrono::steady_clock::now();
    Verdict v;
    v.relation = r.name;
    v.kernel = r.kernel();
    bool all_affine = true, all_unsat = true, capped = false;
    for (const auto& clause : r.clauses) {
        ClauseVerdict cv = analyze_clause(clause, &r, assertions, cfg, opts, nullptr);
        all_affine = all_affine && cv.unsat_affine;
        all_unsat = all_unsat && cv.unsat;
        capped = capped || (!cv.unsat && cv.capped);
        for (const auto& p : cv.properties_used) v.properties_used.insert(p);
        if (r.clauses.size() == 1)
            v.equalities = cv.equalities;
        v.clauses.push_back(std::move(cv));
    }
    if (all_affine)
        v.status = VerdictStatus::UnsatAffine;
    else if (all_unsat)
        v.status = VerdictStatus::UnsatWithProperties;
    else if (capped)
        v.status = VerdictStatus::UnknownCapped;
    else
        v.status = VerdictStatus::MaybeSat;
    if (v.unsat()) v.equalities.clear();
    v.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return v;
}

std::vector<Constraint> discover_equalities(const Conjunction& clause, const std::vector<Assertion>& assertions,
                                            const PropertyConfig& cfg, const AnalysisOptions& opts) {
    ClauseVerdict cv = analyze_clause(clause, nullptr, assertions, cfg, opts, nullptr);
    if (cv.unsat) return {};
    return cv.equalities;
}

size_t worker_count() {
    size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SPARSEDEP_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = std::min(n, static_cast<size_t>(v));
    }
    return n;
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                size_t k = next.fetch_add(1);
                if (k >= n) return;
                try {
                    fn(k);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

nlohmann::json to_json(const Verdict& v) {
    nlohmann::json j;
    j["relation"] = v.relation;
    j["kernel"] = v.kernel;
    j["status"] = to_string(v.status);
    j["properties_used"] = std::vector<std::string>(v.properties_used.begin(), v.properties_used.end());
    std::vector<std::string> eqs;
    for (const auto& e : v.equalities) eqs.push_back(e.to_string());
    j["equalities"] = eqs;
    nlohmann::json clauses = nlohmann::json::array();
    for (const auto& c : v.clauses) {
        nlohmann::json cj;
        cj["unsat"] = c.unsat;
        cj["unsat_affine"] = c.unsat_affine;
        cj["capped"] = c.capped;
        cj["truncated"] = c.truncated;
        cj["instances"] = c.instances;
        cj["certificate"] = c.certificate;
        std::vector<std::string> ce;
        for (const auto& e : c.equalities) ce.push_back(e.to_string());
        cj["equalities"] = ce;
        clauses.push_back(cj);
    }
    j["clauses"] = clauses;
    return j;
}

}  // namespace sparsedep
