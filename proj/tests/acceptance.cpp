// One PASS/FAIL line per acceptance criterion. Exit status 0 only when all
// criteria pass.

#include "sparsedep/analysis.hpp"
#include "sparsedep/complexity.hpp"
#include "sparsedep/corpus.hpp"
#include "sparsedep/inspector.hpp"
#include "sparsedep/matrix_market.hpp"
#include "sparsedep/oracle.hpp"
#include "sparsedep/presburger.hpp"
#include "sparsedep/report.hpp"
#include "sparsedep/superset.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#ifndef SPARSEDEP_SOURCE_DIR
#define SPARSEDEP_SOURCE_DIR "."
#endif

using namespace sparsedep;

namespace {

// pinned tolerances
constexpr double kExampleSeconds = 1.0;
constexpr size_t kOracleInstances = 50;
constexpr std::uint64_t kOracleSeed = 7;
constexpr size_t kInspectorInstances = 10;
constexpr size_t kPresburgerSystems = 10000;
constexpr Int kBox = 8;
constexpr size_t kNormalizeSamples = 10000;
constexpr size_t kPhaseSamples = 500;
constexpr size_t kTriangularMin = 3;

std::string src(const std::string& rel) { return std::string(SPARSEDEP_SOURCE_DIR) + "/" + rel; }

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
};

const Relation& named(const Problem& p, const std::string& name) {
    for (const auto& r : p.relations)
        if (r.name == name) return r;
    throw std::runtime_error("no relation " + name);
}

bool has_equality(const Verdict& v, const Relation& r, const std::string& text) {
    const Constraint want = parse_conjunction(text, r.iterators()).constraints().at(0);
    for (const auto& e : v.equalities)
        if (normalize(e) == want) return true;
    return false;
}

// ---- 1 ----

Outcome worked_examples() {
    Outcome o;
    double slowest = 0;
    size_t passed = 0, total = 0;
    auto run = [&](const std::string& name, const std::function<bool()>& fn) {
        ++total;
        auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            o.fail(name + ": " + e.what());
            return;
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        slowest = std::max(slowest, s);
        if (!ok) o.fail(name);
        else if (s >= kExampleSeconds) o.fail(name + " took " + std::to_string(s) + " s");
        else ++passed;
    };

    Problem fs = parse_problem_file(src("corpus/fs_csr.deps"));
    run("fs_csr_1", [&] {
        return analyze(fs.relations[0], fs.assertions, PropertyConfig::parse("none")).status == VerdictStatus::UnsatAffine;
    });
    run("fs_csr_2", [&] {
        return analyze(fs.relations[1], fs.assertions, PropertyConfig::parse("none")).status == VerdictStatus::UnsatAffine;
    });
    run("crossed rows", [&] {
        Problem p = parse_problem(R"(
symbolic n, nnz;
uf rowptr : 1 -> rowptr;
assert strict_monotone(rowptr);
relation "crossed" { [i, k] -> [ip, mp] : ip < i && k = mp && 0 <= i < n && 0 <= ip < n
    && rowptr(i) <= k < rowptr(i + 1) && rowptr(ip - 1) <= mp < rowptr(ip) }
)");
        Verdict v = analyze(p.relations[0], p.assertions, PropertyConfig::parse("all"));
        return v.status == VerdictStatus::UnsatWithProperties && !v.properties_used.empty();
    });
    run("toy equality", [&] {
        Problem p = parse_problem(R"(
symbolic n;
uf f : 1 -> f;
assert strict_monotone(f);
relation "toy" { [i] -> [ip] : i <= ip && f(ip) <= f(i) && 0 <= i < n && 0 <= ip < n }
)");
        Verdict v = analyze(p.relations[0], p.assertions, PropertyConfig::parse("all"));
        return v.maybe() && has_equality(v, p.relations[0], "i = ip");
    });
    run("left cholesky", [&] {
        Problem p = parse_problem(R"(
symbolic n, nnz;
uf lcolptr : 1 -> lcolptr;
uf prunePtr : 1 -> prunePtr;
uf pruneSet : 1 -> pruneSet;
assert strict_monotone(lcolptr);
relation "lchol" { [colNo] -> [colNop] : exists(j, ip, lp) : j = lp && colNo < colNop && 0 <= colNo < n
    && 0 <= colNop < n && lcolptr(pruneSet(ip)) <= lp < lcolptr(pruneSet(ip) + 1)
    && prunePtr(colNop) <= ip < prunePtr(colNop + 1) && lcolptr(colNo) < j < lcolptr(colNo + 1) }
)");
        const Relation& r = p.relations[0];
        Verdict v = analyze(r, p.assertions, PropertyConfig::parse("all"));
        return v.maybe() && has_equality(v, r, "colNo = pruneSet(ip)") &&
               estimate(r) == ComplexityExpr::parse("n*nnz") && estimate(r, v.equalities) == ComplexityExpr::parse("nnz");
    });
    Problem ic0 = parse_problem_file(src("corpus/ic0.deps"));
    const Relation& r1 = named(ic0, "ic0.W3_W2_lt");
    const Relation& r2 = named(ic0, "ic0.W3_R3m_lt");
    const Relation& r3 = named(ic0, "ic0.W3_R3l_lt");
    run("ic0 R1 contains R2", [&] {
        auto c = find_superset({&r1, {}}, {&r2, {}});
        return c && c->rule == SupersetRule::Trivial;
    });
    run("ic0 R1 contains R3", [&] {
        auto c = find_superset({&r1, {}}, {&r3, {}});
        return c && c->rule == SupersetRule::Overlap;
    });
    std::ostringstream d;
    d << passed << "/" << total << " examples, slowest " << std::fixed;
    d.precision(3);
    d << slowest << " s";
    o.detail = d.str() + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// ---- 2-5 ----

Outcome cells_matching(const Report& r, const std::function<bool(const std::string&)>& select) {
    Outcome o;
    size_t pass = 0, total = 0;
    std::string bad;
    for (const auto& c : r.cells) {
        if (!select(c.name)) continue;
        ++total;
        if (c.pass) {
            ++pass;
            continue;
        }
        o.pass = false;
        bad += " " + c.name + "=" + c.actual + "(want " + c.expected + ")";
    }
    if (total == 0) o.fail("no cells");
    o.detail = std::to_string(pass) + "/" + std::to_string(total) + " cells" + (bad.empty() ? "" : ";" + bad);
    return o;
}

bool starts(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }
bool contains(const std::string& s, const std::string& p) { return s.find(p) != std::string::npos; }

Outcome aggregates(const Report& r) {
    return cells_matching(r, [](const std::string& n) { return starts(n, "aggregate."); });
}

Outcome ablation(const Report& r) {
    Outcome o;
    const size_t mono = r.ablation.at("monotonicity");
    size_t best = 0;
    for (const auto& [cfg, n] : r.ablation) {
        if (cfg == "all" || cfg == "none") continue;
        best = std::max(best, n);
        if (n > mono) o.fail(cfg + " " + std::to_string(n) + " > monotonicity " + std::to_string(mono));
    }
    if (r.ablation.at("all") < best) o.fail("combined below best single");
    if (r.ablation.at("triangular") < kTriangularMin) o.fail("triangular below " + std::to_string(kTriangularMin));
    o.detail = "monotonicity " + std::to_string(mono) + ", correlated " +
               std::to_string(r.ablation.at("correlated_monotonicity")) + ", triangular " +
               std::to_string(r.ablation.at("triangular")) + ", all " + std::to_string(r.ablation.at("all")) +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome checks(const Report& r) {
    Outcome o = cells_matching(r, [](const std::string& n) { return contains(n, ".checks."); });
    for (const auto& row : r.rows) {
        if (row.kernel != "ilu0") continue;
        const auto& [within, total] = row.checks[2];
        if (total - within != 2) {
            o.pass = false;
            o.detail += "; ilu0 keeps " + std::to_string(total - within) + " above kernel";
        }
    }
    return o;
}

Outcome cost(const Report& r) {
    return cells_matching(r, [](const std::string& n) { return contains(n, ".cost."); });
}

// ---- 6 ----

Outcome soundness(const Corpus& c, const std::vector<Verdict>& verdicts, const Report& rep) {
    Outcome o;
    size_t instances = 0, checks = 0, counterexamples = 0, selftests = 0;
    for (size_t pi = 0; pi < c.problems.size(); ++pi) {
        const Problem& p = c.problems[pi];
        std::vector<Verdict> vs;
        std::set<std::string> names;
        for (size_t k = 0; k < c.entries.size(); ++k)
            if (c.entries[k].problem == pi) {
                vs.push_back(verdicts[k]);
                names.insert(verdicts[k].relation);
            }
        std::vector<SupersetClaim> claims;
        for (const auto& row : rep.rows)
            for (const auto& cl : row.minimized.claims)
                if (names.count(cl.superset) && names.count(cl.subset)) claims.push_back(cl);
        auto insts = sample(p.preset, kOracleInstances, kOracleSeed);
        OracleReport r = falsify(p, vs, claims, insts);
        instances += r.instances;
        checks += r.checks;
        counterexamples += r.counterexamples.size();
        for (const auto& ce : r.counterexamples) o.fail(ce.kind + " " + ce.relation + ": " + ce.detail);
        std::vector<std::string> skipped;
        auto missed = oracle_self_test(p, std::vector<ConcreteInstance>(insts.begin(), insts.begin() + 10), &skipped);
        selftests += 3 - skipped.size();
        for (const auto& m : missed) o.fail("self-test: " + m);
    }
    if (selftests == 0) o.fail("no self-test could be built");
    o.detail = std::to_string(instances) + " instances, " + std::to_string(checks) + " checks, " +
               std::to_string(counterexamples) + " counterexamples, " + std::to_string(selftests) +
               " corruptions caught" + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// ---- 7 ----

Outcome inspector(const Corpus& c, const std::vector<Verdict>& verdicts) {
    Outcome o;
    size_t comparisons = 0;
    for (size_t pi = 0; pi < c.problems.size(); ++pi) {
        const Problem& p = c.problems[pi];
        for (const auto& inst : sample(p.preset, kInspectorInstances, kOracleSeed)) {
            DependenceGraph g;
            g.n = inst.constants.at("n");
            for (size_t k : c.unique()) {
                const CorpusEntry& e = c.entries[k];
                if (e.problem != pi || verdicts[k].unsat()) continue;
                const Relation& r = c.relation(e);
                EdgeSet base, simp;
                for (const auto& plan : plan_inspector(r, verdicts[k], false)) {
                    EdgeSet s = run_plan(plan, r, inst, p.ufs);
                    base.insert(s.begin(), s.end());
                }
                for (const auto& plan : plan_inspector(r, verdicts[k], true)) {
                    EdgeSet s = run_plan(plan, r, inst, p.ufs);
                    simp.insert(s.begin(), s.end());
                }
                EdgeSet want = dependence_pairs(r, inst, p.ufs);
                ++comparisons;
                if (base != want || simp != want) o.fail(r.name + " seed " + std::to_string(inst.seed));
                g.add(r.name, want);
            }
            if (!valid_wavefronts(g, wavefronts(g))) o.fail("wavefront order on " + p.path);
        }
    }
    Problem fs = parse_problem_file(src("corpus/fs_csr.deps"));
    auto levels_of = [&](const std::string& fixture) {
        Pattern pat = read_matrix_market(src("fixtures/" + fixture + ".mtx"));
        ConcreteInstance inst = instance_from_pattern(fs.preset, pat);
        DependenceGraph g;
        g.n = pat.n;
        for (const auto& r : fs.relations) {
            Verdict v = analyze(r, fs.assertions, PropertyConfig::parse("all"));
            for (const auto& plan : plan_inspector(r, v, true)) g.add(r.name, run_plan(plan, r, inst, fs.ufs));
        }
        return std::make_pair(wavefronts(g).size(), static_cast<size_t>(pat.n));
    };
    auto [diag, dn] = levels_of("diagonal");
    auto [chain, cn] = levels_of("chain");
    if (diag != 1) o.fail("diagonal gives " + std::to_string(diag) + " levels");
    if (chain != cn) o.fail("chain gives " + std::to_string(chain) + " levels, n = " + std::to_string(cn));
    o.detail = std::to_string(comparisons) + " relation/instance comparisons, diagonal " + std::to_string(diag) +
               " level, chain " + std::to_string(chain) + "/" + std::to_string(cn) + " levels" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// ---- 8 ----

std::string random_monotone_relation(std::mt19937_64& rng) {
    static const std::vector<std::string> terms = {"i", "j", "f(i)", "f(j)", "f(i + 1)", "f(j + 1)", "f(i) + 1",
                                                   "n", "0"};
    static const std::vector<std::string> ops = {"<", "<=", "="};
    std::uniform_int_distribution<size_t> t(0, terms.size() - 1), op(0, ops.size() - 1), k(1, 4);
    std::string body = "0 <= i < n && 0 <= j < n";
    for (size_t c = k(rng); c > 0; --c) {
        size_t a = t(rng), b = t(rng);
        if (a != b) body += " && " + terms[a] + " " + ops[op(rng)] + " " + terms[b];
    }
    return "symbolic n;\nuf f : 1 -> f;\nassert strict_monotone(f);\nrelation \"r\" { [i] -> [j] : " + body + " }\n";
}

Outcome core_numeric() {
    Outcome o;
    std::mt19937_64 rng(kOracleSeed);
    std::uniform_int_distribution<int> coef(-3, 3), cst(-8, 8), count(1, 5), pick(0, 9);
    size_t contradicted = 0, unsat = 0, undecided = 0;
    for (size_t t = 0; t < kPresburgerSystems; ++t) {
        LinearSystem ls({"x", "y", "z"});
        std::vector<std::pair<std::array<Int, 4>, bool>> rows;
        for (size_t v = 0; v < 3; ++v)
            for (Int s : {1, -1}) {
                std::array<Int, 4> row{0, 0, 0, kBox};
                row[v] = s;
                rows.push_back({row, false});
            }
        for (int k = count(rng); k > 0; --k) rows.push_back({{coef(rng), coef(rng), coef(rng), cst(rng)}, pick(rng) < 2});
        for (const auto& [row, eq] : rows) {
            LinearRow lr;
            lr.coef = {row[0], row[1], row[2]};
            lr.constant = row[3];
            if (eq) ls.add_eq(lr);
            else ls.add_geq(lr);
        }
        bool any = false;
        for (Int x = -kBox; x <= kBox && !any; ++x)
            for (Int y = -kBox; y <= kBox && !any; ++y)
                for (Int z = -kBox; z <= kBox && !any; ++z) {
                    bool ok = true;
                    for (const auto& [row, eq] : rows) {
                        Int s = row[0] * x + row[1] * y + row[2] * z + row[3];
                        if (eq ? s != 0 : s < 0) {
                            ok = false;
                            break;
                        }
                    }
                    any = ok;
                }
        CheckResult r = check(ls);
        unsat += r.unsat();
        undecided += r.status == SatStatus::Unknown;
        if (r.unsat() && any) ++contradicted;
    }
    if (contradicted) o.fail(std::to_string(contradicted) + " INTEGER_UNSAT verdicts contradicted");

    size_t not_idempotent = 0;
    for (size_t t = 0; t < kNormalizeSamples; ++t) {
        AffineExpr e(Int{cst(rng)} * 3);
        for (const char* v : {"i", "j", "k"}) e += AffineExpr(Atom::iterator(v), coef(rng) * 2);
        Constraint c = (rng() & 1) ? Constraint::eq(e) : Constraint::geq(e);
        if (normalize(normalize(c)) != normalize(c)) ++not_idempotent;
    }
    if (not_idempotent) o.fail(std::to_string(not_idempotent) + " normalizations not idempotent");

    size_t p1 = 0, lost = 0;
    for (size_t t = 0; t < kPhaseSamples; ++t) {
        Problem p = parse_problem(random_monotone_relation(rng));
        AnalysisOptions only1;
        only1.two_phase.phase2 = false;
        bool a = analyze(p.relations[0], p.assertions, PropertyConfig::parse("all"), only1).unsat();
        bool b = analyze(p.relations[0], p.assertions, PropertyConfig::parse("all")).unsat();
        p1 += a;
        if (a && !b) ++lost;
    }
    if (lost) o.fail(std::to_string(lost) + " phase-1 UNSAT verdicts lost with phase 2");
    o.detail = std::to_string(kPresburgerSystems) + " systems (" + std::to_string(unsat) + " UNSAT, " +
               std::to_string(undecided) + " unknown), " + std::to_string(kNormalizeSamples) + " normalizations, " +
               std::to_string(kPhaseSamples) + " phase checks (" + std::to_string(p1) + " phase-1 UNSAT)" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

}  // namespace

int main() {
    bool all = true;
    auto t0 = std::chrono::steady_clock::now();
    auto print = [&](int n, const std::string& name, const Outcome& o) {
        all &= o.pass;
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << "  " << o.detail
                  << std::endl;
    };
    auto guarded = [](const std::function<Outcome()>& fn) {
        try {
            return fn();
        } catch (const std::exception& e) {
            Outcome o;
            o.fail(std::string("error: ") + e.what());
            return o;
        }
    };

    print(1, "worked examples", guarded(worked_examples));

    Corpus corpus = load_corpus({src("corpus")});
    Manifest manifest = Manifest::load(src("corpus/manifest.json"));
    Report report = build_report(corpus, manifest);
    print(2, "corpus aggregates", guarded([&] { return aggregates(report); }));
    print(3, "ablation ordering", guarded([&] { return ablation(report); }));
    print(4, "runtime checks", guarded([&] { return checks(report); }));
    print(5, "inspector costs", guarded([&] { return cost(report); }));

    auto verdicts = analyze_corpus(corpus, PropertyConfig::parse("all"));
    print(6, "oracle soundness", guarded([&] { return soundness(corpus, verdicts, report); }));
    print(7, "inspector equivalence", guarded([&] { return inspector(corpus, verdicts); }));
    print(8, "core numeric properties", guarded(core_numeric));

    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s in %.1f s\n", all ? "all criteria pass" : "some criteria fail", s);
    return all ? 0 : 1;
}
