#include "sparsedep/parser.hpp"
#include "sparsedep/relation.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sparsedep;
using sparsedep::testing::find_relation;

namespace {

Atom it(const std::string& n) { return Atom::iterator(n); }
AffineExpr var(const std::string& n, Int c = 1) { return AffineExpr(it(n), c); }

Constraint random_constraint(std::mt19937_64& rng) {
    std::uniform_int_distribution<Int> coef(-6, 6), cst(-20, 20);
    AffineExpr e(cst(rng));
    for (const char* v : {"i", "j", "k"}) e += var(v, coef(rng));
    return (rng() & 1) ? Constraint::eq(e) : Constraint::geq(e);
}

}  // namespace

TEST(Expr, TermsStaySortedAndMerged) {
    AffineExpr e = var("j") + var("i", 2) - var("j") + 3;
    ASSERT_EQ(e.terms().size(), 1u);
    EXPECT_EQ(e.coefficient(it("i")), 2);
    EXPECT_EQ(e.constant(), 3);
    EXPECT_FALSE(e.mentions(it("j")));
}

TEST(Expr, FloorCeilDiv) {
    EXPECT_EQ(floor_div(-7, 2), -4);
    EXPECT_EQ(ceil_div(-7, 2), -3);
    EXPECT_EQ(floor_div(7, 2), 3);
    EXPECT_EQ(ceil_div(7, 2), 4);
    EXPECT_EQ(gcd_int(-12, 18), 6);
}

TEST(Expr, NestedCallKeysAndCollection) {
    Atom inner = Atom::call("pruneSet", {var("ip")});
    Atom outer = Atom::call("lcolptr", {AffineExpr(inner) + 1});
    EXPECT_EQ(outer.depth(), 2);
    std::vector<Atom> calls;
    AffineExpr(outer).collect_calls(calls);
    ASSERT_EQ(calls.size(), 2u);
    EXPECT_EQ(calls[0], inner);
    std::set<std::string> its;
    AffineExpr(outer).collect_call_arg_iterators(its);
    EXPECT_EQ(its, std::set<std::string>{"ip"});
}

TEST(Expr, SubstituteInsideCalls) {
    AffineExpr e(Atom::call("f", {var("i") + 1}));
    AffineExpr s = e.substitute(it("i"), var("j"));
    EXPECT_EQ(s, AffineExpr(Atom::call("f", {var("j") + 1})));
}

TEST(Constraint, NormalizeDividesByGcd) {
    // 4i + 6 >= 0 tightens to i + 1 >= 0
    Constraint c = normalize(Constraint::geq(var("i", 4) + 6));
    EXPECT_EQ(c.expr.coefficient(it("i")), 1);
    EXPECT_EQ(c.expr.constant(), 1);
    // 2i = 3 has no integer solution and is left as is
    Constraint e = normalize(Constraint::eq(var("i", 2) - 3));
    EXPECT_EQ(e.expr.coefficient(it("i")), 2);
}

TEST(Constraint, NormalizeIsIdempotent) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 5000; ++t) {
        Constraint c = random_constraint(rng);
        Constraint n = normalize(c);
        EXPECT_EQ(normalize(n), n) << c.to_string();
    }
}

TEST(Constraint, NegateGeqComplementsIntegers) {
    Constraint c = Constraint::geq(var("i", 3) - 5);
    Constraint nc = negate_geq(c);
    for (Int i = -10; i <= 10; ++i) {
        bool a = (c.substitute(it("i"), AffineExpr(i)).truth()).value();
        bool b = (nc.substitute(it("i"), AffineExpr(i)).truth()).value();
        EXPECT_NE(a, b) << i;
    }
}

TEST(Conjunction, SortedUniqueNormalized) {
    Conjunction c;
    c.add(Constraint::le(var("i"), var("j")));
    c.add(Constraint::geq(var("j", 2) - var("i", 2)));
    c.add(Constraint::lt(var("i"), AffineExpr(Atom::symbolic("n"))));
    EXPECT_EQ(c.size(), 2u);
    Conjunction d(c.constraints());
    EXPECT_EQ(c, d);
    EXPECT_TRUE(d.subset_of(c));
}

TEST(Parser, RoundTripThroughText) {
    Problem p = parse_problem(R"(
symbolic n, nnz;
uf rowptr : 1 -> rowptr;
uf col : 1 -> col;
assert strict_monotone(rowptr);
relation "dep" kernel="fs_csr" access="x[i] / x[col(k)]" {
  [i, k] -> [ip, kp] : i < ip && 0 <= i < n && 0 <= ip < n && rowptr(i) <= k < rowptr(i + 1)
    && rowptr(ip) <= kp < rowptr(ip + 1) && i = col(kp)
}
)");
    ASSERT_EQ(p.relations.size(), 1u);
    const Relation& r = p.relations[0];
    EXPECT_EQ(r.kernel(), "fs_csr");
    EXPECT_EQ(r.in_outer(), "i");
    EXPECT_EQ(r.out_outer(), "ip");
    Relation again = parse_relation(r.to_string(), p);
    EXPECT_EQ(again.to_string(), r.to_string());
    EXPECT_EQ(canonical_key(again), canonical_key(r));
}

TEST(Parser, ChainedComparisonsExpand) {
    Conjunction c = parse_conjunction("0 <= i < n", {"i"});
    EXPECT_EQ(c.size(), 2u);
}

TEST(Parser, MayGuardsAreTagged) {
    Relation r = parse_relation("{ [i] -> [j] : i < j && may(f(i) = f(j)) }");
    ASSERT_EQ(r.clauses.size(), 1u);
    size_t may = 0;
    for (const auto& c : r.clauses[0].constraints()) may += c.tag == Tag::May;
    EXPECT_EQ(may, 1u);
}

TEST(Parser, ErrorsCarryLineAndColumn) {
    try {
        parse_problem("symbolic n;\nrelation \"x\" { [i] -> [j] : i < }\n", "bad.deps");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_GT(e.column(), 1);
        EXPECT_NE(std::string(e.what()).find("bad.deps:2:"), std::string::npos);
    }
}

TEST(Parser, RejectsUnknownBuiltin) {
    EXPECT_THROW(parse_problem("uf f : 1 -> f;\nassert sideways(f);\n"), std::exception);
}

TEST(Relation, CanonicalKeyIgnoresIteratorNames) {
    Relation a = parse_relation("{ [i] -> [j] : i < j && 0 <= i && j < n && f(i) = f(j) }");
    Relation b = parse_relation("{ [x] -> [y] : f(y) = f(x) && x < y && y < n && 0 <= x }");
    EXPECT_EQ(canonical_key(a), canonical_key(b));
    Relation c = parse_relation("{ [x] -> [y] : f(y) = f(x) && x <= y && y < n && 0 <= x }");
    EXPECT_NE(canonical_key(a), canonical_key(c));
}

TEST(Relation, MirrorIsAnInvolution) {
    Relation a = parse_relation("{ [i, k] -> [j, m] : i < j && k = m && 0 <= i && j < n && f(i) <= k }");
    Relation m = mirror(a);
    EXPECT_EQ(m.in_tuple, a.out_tuple);
    EXPECT_EQ(m.out_tuple, a.in_tuple);
    EXPECT_EQ(canonical_key(mirror(m)), canonical_key(a));
    EXPECT_NE(canonical_key(m), canonical_key(a));
}

TEST(Relation, FreeUfTermsInnermostFirst) {
    Relation r = parse_relation("{ [i] -> [j] : g(f(i) + 1) <= j && f(i) >= 0 }");
    auto terms = free_uf_terms(r);
    ASSERT_EQ(terms.size(), 2u);
    EXPECT_EQ(terms[0].name(), "f");
    EXPECT_EQ(terms[1].name(), "g");
}

TEST(Relation, CorpusRelationsSurviveReparse) {
    for (const char* f : {"fs_csr.deps", "ic0.deps", "left_cholesky.deps"}) {
        Problem p = parse_problem_file(sparsedep::testing::corpus_path(f));
        for (const auto& r : p.relations) {
            Relation again = parse_relation(r.to_string(), p);
            EXPECT_EQ(canonical_key(again), canonical_key(r)) << r.name;
        }
    }
}
