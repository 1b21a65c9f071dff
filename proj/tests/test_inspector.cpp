#include "sparsedep/corpus.hpp"
#include "sparsedep/inspector.hpp"
#include "sparsedep/matrix_market.hpp"
#include "sparsedep/report.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace sparsedep;
using namespace sparsedep::testing;

namespace {

struct Analyzed {
    Corpus c;
    std::vector<Verdict> verdicts;
    explicit Analyzed(const std::string& file)
        : c(load_corpus({corpus_path(file)})), verdicts(analyze_corpus(c, PropertyConfig::parse("all"))) {}

    const Problem& problem() const { return c.problems.front(); }

    // relation names checked at runtime: every MAYBE relation, or the kept set
    std::set<std::string> names(bool minimized) const {
        std::set<std::string> out;
        KernelRow row = kernel_row(c, c.kernels.front(), verdicts, verdicts, ComplexityExpr{}, kDefaultDensity);
        for (size_t k : c.unique())
            if (verdicts[k].maybe()) out.insert(c.relation(c.entries[k]).name);
        if (minimized) {
            std::set<std::string> kept(row.minimized.kept.begin(), row.minimized.kept.end());
            std::erase_if(out, [&](const std::string& n) { return !kept.count(n); });
        }
        return out;
    }

    DependenceGraph graph(const ConcreteInstance& inst, bool simplified, bool minimized) const {
        DependenceGraph g;
        g.n = inst.constants.at("n");
        auto wanted = names(minimized);
        for (size_t k : c.unique()) {
            const Relation& r = c.relation(c.entries[k]);
            if (!wanted.count(r.name)) continue;
            for (const auto& plan : plan_inspector(r, verdicts[k], simplified))
                g.add(r.name, run_plan(plan, r, inst, problem().ufs));
        }
        return g;
    }

    EdgeSet oracle(const ConcreteInstance& inst) const {
        EdgeSet all;
        for (size_t k : c.unique()) {
            EdgeSet p = dependence_pairs(c.relation(c.entries[k]), inst, problem().ufs);
            all.insert(p.begin(), p.end());
        }
        return unordered(all);
    }
};

ConcreteInstance fixture(const Analyzed& a, const std::string& name) {
    return instance_from_pattern(a.problem().preset, read_matrix_market(resolve_matrix_path(fixture_path(name))));
}

}  // namespace

TEST(Inspector, ForwardSolveSmallFixture) {
    Analyzed a("fs_csr.deps");
    ConcreteInstance inst = fixture(a, "fs_small");
    DependenceGraph g = a.graph(inst, true, true);
    EXPECT_EQ(g.edge_set(), (EdgeSet{{0, 1}, {0, 4}, {1, 3}, {2, 4}, {3, 4}}));
    EXPECT_EQ(g.edge_set(), a.oracle(inst));
    auto levels = wavefronts(g);
    EXPECT_EQ(levels, (std::vector<std::vector<Int>>{{0, 2}, {1}, {3}, {4}}));
    EXPECT_TRUE(valid_wavefronts(g, levels));
}

TEST(Inspector, DiagonalIsOneLevel) {
    Analyzed a("fs_csr.deps");
    DependenceGraph g = a.graph(fixture(a, "diagonal"), true, true);
    EXPECT_TRUE(g.edges.empty());
    EXPECT_EQ(wavefronts(g).size(), 1u);
}

TEST(Inspector, ChainIsFullySerial) {
    Analyzed a("fs_csr.deps");
    DependenceGraph g = a.graph(fixture(a, "chain"), true, true);
    EXPECT_EQ(wavefronts(g).size(), 6u);
}

// Baseline and simplified inspectors, over all MAYBE relations or only the
// kept ones, find exactly the oracle's edges.
TEST(Inspector, AgreesWithOracleOnEveryKernel) {
    for (const char* f : {"fs_csr.deps", "fs_csc.deps", "gs_csr.deps", "gs_bcsr.deps", "spmv.deps", "ilu0.deps",
                          "ic0.deps", "left_cholesky.deps"}) {
        Analyzed a(f);
        for (const auto& inst : sample(a.problem().preset, 6, 21)) {
            EdgeSet want = a.oracle(inst);
            EXPECT_EQ(a.graph(inst, false, false).edge_set(), want) << f;
            EXPECT_EQ(a.graph(inst, true, false).edge_set(), want) << f;
            DependenceGraph kept = a.graph(inst, true, true);
            EXPECT_EQ(kept.edge_set(), want) << f;
            EXPECT_TRUE(valid_wavefronts(kept, wavefronts(kept))) << f;
        }
    }
}

TEST(Inspector, SimplifiedRunsFewerPoints) {
    Analyzed a("left_cholesky.deps");
    ConcreteInstance inst = generate(a.problem().preset, 40, 0.15, 3);
    std::uint64_t base = 0, simp = 0;
    for (size_t k : a.c.unique()) {
        if (a.verdicts[k].unsat()) continue;
        const Relation& r = a.c.relation(a.c.entries[k]);
        for (const auto& plan : plan_inspector(r, a.verdicts[k], false)) run_plan(plan, r, inst, a.problem().ufs, &base);
        for (const auto& plan : plan_inspector(r, a.verdicts[k], true)) run_plan(plan, r, inst, a.problem().ufs, &simp);
    }
    EXPECT_LT(simp, base);
}

TEST(Inspector, UnsatClausesHaveNoPlan) {
    Analyzed a("fs_csr.deps");
    for (size_t k : a.c.unique())
        if (a.verdicts[k].unsat()) EXPECT_TRUE(plan_inspector(a.c.relation(a.c.entries[k]), a.verdicts[k], true).empty());
}

TEST(Inspector, PseudoCodeShape) {
    Analyzed a("left_cholesky.deps");
    bool derived = false;
    for (size_t k : a.c.unique()) {
        if (a.verdicts[k].unsat()) continue;
        const Relation& r = a.c.relation(a.c.entries[k]);
        for (const auto& plan : plan_inspector(r, a.verdicts[k], true)) {
            std::string text = emit_pseudo(plan, r);
            EXPECT_NE(text.find("for ("), std::string::npos);
            EXPECT_NE(text.find("add_edge(" + r.in_outer() + ", " + r.out_outer() + ")"), std::string::npos) << text;
            derived |= text.find(" = pruneSet(ip);") != std::string::npos;
        }
    }
    EXPECT_TRUE(derived);
}

TEST(Wavefronts, LevelsFollowEdges) {
    DependenceGraph g;
    g.n = 5;
    g.add("r", {{0, 2}, {2, 4}, {1, 3}});
    auto levels = wavefronts(g);
    EXPECT_EQ(levels, (std::vector<std::vector<Int>>{{0, 1}, {2, 3}, {4}}));
    EXPECT_TRUE(valid_wavefronts(g, levels));
    EXPECT_FALSE(valid_wavefronts(g, {{0, 1, 2}, {3, 4}}));
    EXPECT_FALSE(valid_wavefronts(g, {{0, 1}, {2, 3}}));
}

TEST(Wavefronts, EdgesStoredUnordered) {
    DependenceGraph g;
    g.n = 3;
    g.add("a", {{2, 0}});
    g.add("b", {{0, 2}});
    ASSERT_EQ(g.edges.size(), 1u);
    EXPECT_EQ(g.edges.begin()->second, (std::set<std::string>{"a", "b"}));
}

TEST(Wavefronts, RejectsSelfEdgesAndRange) {
    DependenceGraph g;
    g.n = 3;
    g.add("a", {{1, 1}});
    EXPECT_THROW(wavefronts(g), std::exception);
    DependenceGraph h;
    h.n = 2;
    h.add("a", {{0, 5}});
    EXPECT_THROW(wavefronts(h), std::exception);
}

TEST(Wavefronts, JsonAndDot) {
    DependenceGraph g;
    g.n = 3;
    g.add("r", {{0, 1}});
    auto levels = wavefronts(g);
    nlohmann::json j = g.to_json(levels);
    EXPECT_EQ(j["n"], 3);
    EXPECT_EQ(j["edges"].size(), 1u);
    EXPECT_EQ(j["levels"].size(), 2u);
    EXPECT_NE(g.to_dot(levels).find("0 -> 1;"), std::string::npos);
}
