#include "sparsedep/corpus.hpp"
#include "sparsedep/generators.hpp"
#include "sparsedep/instance.hpp"
#include "sparsedep/matrix_market.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sstream>

using namespace sparsedep;
using namespace sparsedep::testing;

namespace {

Pattern mm(const std::string& text) {
    std::istringstream in(text);
    return read_matrix_market(in, "t.mtx");
}

}  // namespace

TEST(Generators, PresetNames) {
    for (const auto& p : preset_names()) EXPECT_TRUE(is_preset(p));
    EXPECT_FALSE(is_preset("auto"));
    EXPECT_EQ(preset_names().size(), 5u);
}

// Generated instances satisfy every assertion of the corpus problems that use
// the preset.
TEST(Generators, SamplesSatisfyDeclaredAssertions) {
    Corpus c = load_corpus({corpus_path()});
    for (const auto& p : c.problems) {
        ASSERT_TRUE(is_preset(p.preset)) << p.path;
        for (const auto& inst : sample(p.preset, 40, 9)) {
            auto bad = validate(inst, p.assertions, p.ufs);
            EXPECT_TRUE(bad.empty()) << p.path << ": " << (bad.empty() ? "" : bad[0]);
        }
    }
}

TEST(Generators, DeterministicInSeed) {
    for (const auto& preset : preset_names()) {
        auto a = sample(preset, 5, 42), b = sample(preset, 5, 42), c = sample(preset, 5, 43);
        for (size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].to_json(), b[k].to_json());
        EXPECT_NE(a[0].to_json(), c[0].to_json());
    }
}

TEST(Generators, JsonRoundTrip) {
    ConcreteInstance inst = generate("cholesky_prune_sets", 9, 0.3, 5);
    ConcreteInstance back = ConcreteInstance::from_json(inst.to_json());
    EXPECT_EQ(back.to_json(), inst.to_json());
    EXPECT_EQ(back.arrays, inst.arrays);
}

TEST(Generators, CsrArraysAreConsistent) {
    ConcreteInstance inst = generate("csr_lower_triangular", 12, 0.4, 1);
    const auto& rowptr = inst.arrays.at("rowptr");
    const auto& col = inst.arrays.at("col");
    ASSERT_EQ(rowptr.size(), 13u);
    EXPECT_EQ(rowptr.back(), static_cast<Int>(col.size()));
    EXPECT_EQ(inst.constants.at("nnz"), static_cast<Int>(col.size()));
    for (Int i = 0; i < 12; ++i) {
        // diagonal last in each lower-triangular row
        EXPECT_EQ(col[rowptr[i + 1] - 1], i);
        for (Int k = rowptr[i]; k < rowptr[i + 1]; ++k) EXPECT_LE(col[k], i);
    }
}

TEST(Generators, DiagPtrPointsAtDiagonal) {
    ConcreteInstance inst = generate("csr_with_diagptr", 10, 0.5, 3);
    const auto& diag = inst.arrays.at("diag");
    for (Int i = 0; i < 10; ++i) EXPECT_EQ(inst.arrays.at("col")[diag[i]], i);
}

TEST(Generators, PruneSetsMatchSymbolicFactor) {
    // arrow pattern: every row touches column 0, so L fills in completely
    Pattern p;
    p.n = 4;
    p.rows = {{0}, {0, 1}, {0, 2}, {0, 3}};
    ConcreteInstance inst = instance_from_pattern("cholesky_prune_sets", p);
    EXPECT_EQ(inst.arrays.at("pruneptr"), (std::vector<Int>{0, 0, 1, 3, 6}));
    EXPECT_EQ(inst.arrays.at("lcolptr").back(), 10);
}

TEST(Generators, RejectsBadInput) {
    EXPECT_THROW(generate("csr_general", 0, 0.5, 1), std::invalid_argument);
    EXPECT_THROW(generate("csr_general", kMaxInstanceSize + 1, 0.5, 1), std::invalid_argument);
    EXPECT_THROW(generate("csr_general", 4, 1.5, 1), std::invalid_argument);
    EXPECT_THROW(generate("nope", 4, 0.5, 1), std::invalid_argument);
    Pattern p;
    p.n = 2;
    p.rows = {{0}, {0}};
    EXPECT_THROW(instance_from_pattern("csr_general", p), std::invalid_argument);
}

TEST(Validate, ReportsBrokenMonotonicity) {
    Problem p = parse_problem_file(corpus_path("fs_csr.deps"));
    ConcreteInstance inst = generate("csr_lower_triangular", 6, 0.4, 2);
    inst.arrays["rowptr"][3] = inst.arrays["rowptr"][2];
    EXPECT_FALSE(validate(inst, p.assertions, p.ufs).empty());
}

TEST(MatrixMarket, Fixture) {
    Pattern p = read_matrix_market(fixture_path("fs_small.mtx"));
    EXPECT_EQ(p.n, 5);
    EXPECT_EQ(p.nnz(), 10);
    EXPECT_EQ(p.rows[4], (std::vector<Int>{0, 2, 3, 4}));
    EXPECT_EQ(resolve_matrix_path(fixture_path("fs_small")), fixture_path("fs_small.mtx"));
}

TEST(MatrixMarket, SymmetricExpands) {
    Pattern p = mm("%%MatrixMarket matrix coordinate pattern symmetric\n3 3 3\n1 1\n2 1\n3 3\n");
    EXPECT_EQ(p.rows[0], (std::vector<Int>{0, 1}));
    EXPECT_EQ(p.rows[1], (std::vector<Int>{0}));
}

TEST(MatrixMarket, Errors) {
    EXPECT_THROW(mm(""), MatrixMarketError);
    EXPECT_THROW(mm("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"), MatrixMarketError);
    EXPECT_THROW(mm("%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1\n"), MatrixMarketError);
    EXPECT_THROW(mm("%%MatrixMarket matrix coordinate real general\n0 0 0\n"), MatrixMarketError);
    EXPECT_THROW(mm("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"), MatrixMarketError);
    EXPECT_THROW(mm("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"), MatrixMarketError);
    EXPECT_THROW(read_matrix_market(fixture_path("missing.mtx")), MatrixMarketError);
    try {
        mm("%%MatrixMarket matrix coordinate real general\n2 2 1\n% c\nx y\n");
        FAIL();
    } catch (const MatrixMarketError& e) {
        EXPECT_NE(std::string(e.what()).find("t.mtx:4:"), std::string::npos) << e.what();
    }
}
