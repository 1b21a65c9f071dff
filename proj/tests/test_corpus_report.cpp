#include "sparsedep/corpus.hpp"
#include "sparsedep/report.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

using namespace sparsedep;
using namespace sparsedep::testing;

namespace {

const ReportCell& cell(const Report& r, const std::string& name) {
    for (const auto& c : r.cells)
        if (c.name == name) return c;
    throw std::runtime_error("no cell " + name);
}

struct Built {
    Corpus c = load_corpus({corpus_path()});
    Manifest m = Manifest::load(corpus_path("manifest.json"));
    Report r = build_report(c, m);
};

const Built& built() {
    static Built b;
    return b;
}

}  // namespace

TEST(Corpus, DuplicatesShareKeysWithinKernel) {
    Corpus c = load_corpus({corpus_path()});
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : c.entries) {
        bool fresh = seen.insert({e.kernel, e.key}).second;
        EXPECT_EQ(fresh, !e.duplicate_of.has_value());
        if (e.duplicate_of) EXPECT_EQ(c.entries[*e.duplicate_of].key, e.key);
    }
    EXPECT_EQ(c.unique().size(), seen.size());
    EXPECT_EQ(c.kernels.size(), 8u);
}

TEST(Corpus, DuplicateVerdictsCarryOwnName) {
    Corpus c = load_corpus({corpus_path()});
    auto v = analyze_corpus(c, PropertyConfig::parse("all"));
    for (size_t k = 0; k < c.entries.size(); ++k) {
        EXPECT_EQ(v[k].relation, c.relation(c.entries[k]).name);
        if (auto d = c.entries[k].duplicate_of) EXPECT_EQ(v[k].status, v[*d].status);
    }
}

TEST(Corpus, SummaryCountsAddUp) {
    Corpus c = load_corpus({corpus_path()});
    CorpusSummary s = summarize(c, analyze_corpus(c, PropertyConfig::parse("all")));
    EXPECT_EQ(s.total.relations, c.entries.size());
    EXPECT_EQ(s.total.unique, c.unique().size());
    EXPECT_EQ(s.total.unsat() + s.total.maybe, s.total.unique);
    size_t per = 0;
    for (const auto& [k, t] : s.per_kernel) per += t.unique;
    EXPECT_EQ(per, s.total.unique);
}

TEST(Corpus, EmptyAndMissing) {
    Corpus c = load_corpus({});
    EXPECT_TRUE(c.entries.empty());
    EXPECT_EQ(summarize(c, {}).line(), "0 relations");
    EXPECT_THROW(load_corpus({corpus_path("nope.deps")}), std::runtime_error);
    auto dir = std::filesystem::temp_directory_path() / "sparsedep_empty_corpus";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "empty.deps") << "# nothing here\n";
    Corpus e = load_corpus({dir.string()});
    EXPECT_EQ(e.problems.size(), 1u);
    EXPECT_TRUE(e.entries.empty());
    std::filesystem::remove_all(dir);
}

TEST(Manifest, LoadsCorpusManifest) {
    Manifest m = Manifest::load(corpus_path("manifest.json"));
    EXPECT_EQ(m.kernels.size(), 8u);
    ASSERT_NE(m.find("ic0"), nullptr);
    EXPECT_TRUE(m.find("ic0")->checks.has_value());
    EXPECT_EQ(m.find("nope"), nullptr);
    EXPECT_EQ(m.aggregates.at("relations"), 124u);
    EXPECT_THROW(Manifest::load(corpus_path("missing.json")), std::runtime_error);
    EXPECT_THROW(Manifest::from_json(nlohmann::json::parse(R"({"kernels": [{"title": "x"}]})")), std::exception);
}

TEST(Report, ByteIdenticalAcrossRuns) {
    const Built& b = built();
    Report again = build_report(b.c, b.m);
    EXPECT_EQ(again.to_json().dump(), b.r.to_json().dump());
    EXPECT_EQ(again.to_text(), b.r.to_text());
    EXPECT_EQ(again.class_csv(), b.r.class_csv());
}

TEST(Report, KernelCellsThatMatch) {
    const Report& r = built().r;
    for (const char* k : {"fs_csr", "fs_csc", "gs_csr", "spmv", "ilu0", "left_cholesky"})
        for (const char* col : {"remaining", "equality", "superset"})
            EXPECT_TRUE(cell(r, std::string(k) + ".checks." + col).pass) << k << " " << col;
    for (const char* k : {"fs_csr", "fs_csc", "gs_csr", "gs_bcsr", "spmv", "ilu0", "ic0", "left_cholesky"})
        EXPECT_TRUE(cell(r, std::string(k) + ".cost.simplified").pass) << k;
}

TEST(Report, FailingCellsAreFlagged) {
    for (const auto& c : built().r.cells)
        if (!c.pass) EXPECT_FALSE(c.deviation.empty()) << c.name;
}

TEST(Report, AblationShape) {
    const Report& r = built().r;
    size_t best_single = 0;
    std::string best;
    for (const auto& [cfg, n] : r.ablation)
        if (cfg != "all" && cfg != "none" && n > best_single) best_single = n, best = cfg;
    EXPECT_EQ(best, "monotonicity");
    EXPECT_EQ(r.ablation.at("none"), 0u);
    EXPECT_GE(r.ablation.at("all"), best_single);
    EXPECT_GE(r.ablation.at("triangular"), built().m.triangular_min);
    EXPECT_TRUE(cell(r, "ablation.monotonicity_highest").pass);
    EXPECT_TRUE(cell(r, "ablation.combined").pass);
}

TEST(Report, ClassCsv) {
    std::string csv = built().r.class_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "class,baseline,monotonicity,correlated_monotonicity,triangular,all");
    // every class row: remaining MAYBE never grows when properties are enabled
    for (const auto& [m, counts] : built().r.classes)
        for (const auto& [cfg, n] : counts) EXPECT_LE(n, counts.at("baseline")) << m.to_string() << " " << cfg;
}

TEST(Report, EmptyCorpusReport) {
    Corpus c = load_corpus({});
    Manifest m;
    Report r = build_report(c, m);
    EXPECT_TRUE(r.rows.empty());
    EXPECT_NO_THROW(r.to_json().dump());
}
