#include "sparsedep/analysis.hpp"
#include "sparsedep/complexity.hpp"
#include "sparsedep/corpus.hpp"
#include "sparsedep/parser.hpp"
#include "sparsedep/report.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace sparsedep;
using namespace sparsedep::testing;

namespace {

const char* kForwardSolve = R"(
symbolic n, nnz;
uf rowptr : 1 -> rowptr;
uf col : 1 -> col;
assert strict_monotone(rowptr);
relation "flow" { [i, k] -> [ip, kp] : exists(m) : i < ip && 0 <= i < n && 0 <= ip < n
    && rowptr(i) <= k < rowptr(i + 1) && rowptr(ip) <= kp < rowptr(ip + 1) && i = col(kp) }
relation "crossed" { [i, k] -> [ip, mp] : ip < i && k = mp && 0 <= i < n && 0 <= ip < n
    && rowptr(i) <= k < rowptr(i + 1) && rowptr(ip - 1) <= mp < rowptr(ip) }
)";

bool has_equality(const std::vector<Constraint>& eqs, const std::string& text, const Relation& r) {
    const Constraint want = parse_conjunction(text, r.iterators()).constraints().at(0);
    for (const auto& e : eqs)
        if (normalize(e) == want) return true;
    return false;
}

}  // namespace

TEST(Analysis, PropertyConfigParsing) {
    EXPECT_EQ(PropertyConfig::parse("none").mode, PropertyConfig::Mode::None);
    EXPECT_EQ(PropertyConfig::parse("all").mode, PropertyConfig::Mode::All);
    PropertyConfig s = PropertyConfig::parse("single:triangular");
    EXPECT_EQ(s.mode, PropertyConfig::Mode::Single);
    EXPECT_EQ(s.category, "triangular");
    EXPECT_EQ(s.to_string(), "single:triangular");
    EXPECT_THROW(PropertyConfig::parse("some"), std::invalid_argument);
}

// fs_csr_1 and fs_csr_2 are affine UNSAT without any
// assertion: no loop-carried reads of the diagonal.
TEST(Analysis, ForwardSolveAffineUnsat) {
    Problem p = parse_problem_file(corpus_path("fs_csr.deps"));
    Verdict v1 = analyze(p.relations[0], p.assertions, PropertyConfig::parse("none"));
    Verdict v2 = analyze(p.relations[1], p.assertions, PropertyConfig::parse("none"));
    EXPECT_EQ(v1.status, VerdictStatus::UnsatAffine);
    EXPECT_EQ(v2.status, VerdictStatus::UnsatAffine);
}

TEST(Analysis, MonotonicityRefutesCrossedRows) {
    Problem p = parse_problem(kForwardSolve);
    const Relation& r = find_relation(p, "crossed");
    EXPECT_EQ(analyze(r, p.assertions, PropertyConfig::parse("none")).status, VerdictStatus::MaybeSat);
    Verdict v = analyze(r, p.assertions, PropertyConfig::parse("all"));
    EXPECT_EQ(v.status, VerdictStatus::UnsatWithProperties);
    EXPECT_EQ(v.properties_used.count("strict_monotone(rowptr)") + v.properties_used.count("strict_monotone(rowptr)#converse"),
              v.properties_used.size());
    EXPECT_FALSE(v.properties_used.empty());
    EXPECT_EQ(analyze(r, p.assertions, PropertyConfig::parse("single:monotonicity")).status,
              VerdictStatus::UnsatWithProperties);
    EXPECT_EQ(analyze(r, p.assertions, PropertyConfig::parse("single:triangular")).status, VerdictStatus::MaybeSat);
}

TEST(Analysis, FlowDependenceStaysMaybe) {
    Problem p = parse_problem(kForwardSolve);
    EXPECT_EQ(analyze(find_relation(p, "flow"), p.assertions, PropertyConfig::parse("all")).status,
              VerdictStatus::MaybeSat);
}

TEST(Analysis, ToyEqualityFromMonotonicity) {
    Problem p = parse_problem(R"(
symbolic n;
uf f : 1 -> f;
assert strict_monotone(f);
relation "toy" { [i] -> [ip] : i <= ip && f(ip) <= f(i) && 0 <= i < n && 0 <= ip < n }
)");
    Verdict v = analyze(p.relations[0], p.assertions, PropertyConfig::parse("all"));
    EXPECT_EQ(v.status, VerdictStatus::MaybeSat);
    EXPECT_TRUE(has_equality(v.equalities, "i = ip", p.relations[0]));
    Verdict none = analyze(p.relations[0], p.assertions, PropertyConfig::parse("none"));
    EXPECT_FALSE(has_equality(none.equalities, "i = ip", p.relations[0]));
}

TEST(Analysis, LeftCholeskyEqualityAndCost) {
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
    ASSERT_EQ(v.status, VerdictStatus::MaybeSat);
    EXPECT_TRUE(has_equality(v.equalities, "colNo = pruneSet(ip)", r));
    EXPECT_EQ(estimate(r).to_string(), "(n*nnz)");
    EXPECT_EQ(estimate(r, v.equalities).to_string(), "(nnz)");
}

TEST(Analysis, DiscoverEqualitiesMatchesVerdict) {
    Problem p = parse_problem_file(corpus_path("left_cholesky.deps"));
    for (const auto& r : p.relations) {
        Verdict v = analyze(r, p.assertions, PropertyConfig::parse("all"));
        for (size_t c = 0; c < r.clauses.size(); ++c) {
            auto eqs = discover_equalities(r.clauses[c], p.assertions, PropertyConfig::parse("all"));
            if (v.clauses[c].unsat) EXPECT_TRUE(eqs.empty()) << r.name;
            else EXPECT_EQ(eqs.size(), v.clauses[c].equalities.size()) << r.name;
        }
    }
}

// Enabling more assertion categories never loses an UNSAT verdict.
TEST(Analysis, AblationConfigsAreSubsetsOfAll) {
    Corpus c = load_corpus({corpus_path()});
    auto all = analyze_corpus(c, PropertyConfig::parse("all"));
    for (const auto& cfg : ablation_configs()) {
        auto v = analyze_corpus(c, PropertyConfig::parse(cfg));
        for (size_t k = 0; k < v.size(); ++k)
            if (v[k].unsat()) EXPECT_TRUE(all[k].unsat()) << cfg << " " << v[k].relation;
    }
}

TEST(Analysis, DeterministicAcrossThreadCounts) {
    Corpus c = load_corpus({corpus_path("ic0.deps"), corpus_path("ilu0.deps")});
    setenv("SPARSEDEP_THREADS", "1", 1);
    auto a = analyze_corpus(c, PropertyConfig::parse("all"));
    setenv("SPARSEDEP_THREADS", "4", 1);
    auto b = analyze_corpus(c, PropertyConfig::parse("all"));
    unsetenv("SPARSEDEP_THREADS");
    ASSERT_EQ(a.size(), b.size());
    for (size_t k = 0; k < a.size(); ++k) {
        nlohmann::json ja = to_json(a[k]), jb = to_json(b[k]);
        ja.erase("millis");
        jb.erase("millis");
        EXPECT_EQ(ja, jb);
    }
}

TEST(Analysis, VerdictJsonShape) {
    Problem p = parse_problem(kForwardSolve);
    nlohmann::json j = to_json(analyze(find_relation(p, "crossed"), p.assertions, PropertyConfig::parse("all")));
    EXPECT_EQ(j["relation"], "crossed");
    EXPECT_EQ(j["status"], "UNSAT_WITH_PROPERTIES");
    EXPECT_TRUE(j.contains("clauses"));
}
