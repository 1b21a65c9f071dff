#include "sparsedep/presburger.hpp"
#include "sparsedep/parser.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sparsedep;

namespace {

constexpr Int kBox = 8;
const std::vector<std::string> kVars = {"x", "y", "z"};

struct Random {
    LinearSystem ls{kVars};
    std::vector<std::pair<LinearRow, bool>> rows;  // row, is_eq
};

Random random_system(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coef(-3, 3), cst(-8, 8), count(1, 5), pick(0, 9);
    Random r;
    for (size_t v = 0; v < kVars.size(); ++v) {
        LinearRow lo, hi;
        lo.coef.assign(kVars.size(), 0);
        hi.coef.assign(kVars.size(), 0);
        lo.coef[v] = 1;
        lo.constant = kBox;
        hi.coef[v] = -1;
        hi.constant = kBox;
        r.ls.add_geq(lo);
        r.ls.add_geq(hi);
        r.rows.push_back({lo, false});
        r.rows.push_back({hi, false});
    }
    for (int k = count(rng); k > 0; --k) {
        LinearRow row;
        for (size_t v = 0; v < kVars.size(); ++v) row.coef.push_back(coef(rng));
        row.constant = cst(rng);
        bool eq = pick(rng) < 2;
        if (eq) r.ls.add_eq(row);
        else r.ls.add_geq(row);
        r.rows.push_back({row, eq});
    }
    return r;
}

bool holds(const std::vector<std::pair<LinearRow, bool>>& rows, const Int* p) {
    for (const auto& [row, eq] : rows) {
        BigInt s = row.constant;
        for (size_t v = 0; v < kVars.size(); ++v) s += row.at(v) * p[v];
        if (eq ? s != 0 : s < 0) return false;
    }
    return true;
}

std::vector<std::array<Int, 3>> points(const Random& r) {
    std::vector<std::array<Int, 3>> out;
    std::array<Int, 3> p{};
    for (p[0] = -kBox; p[0] <= kBox; ++p[0])
        for (p[1] = -kBox; p[1] <= kBox; ++p[1])
            for (p[2] = -kBox; p[2] <= kBox; ++p[2])
                if (holds(r.rows, p.data())) out.push_back(p);
    return out;
}

bool satisfies(const Constraint& c, const std::array<Int, 3>& p) {
    Constraint s = c;
    for (size_t v = 0; v < kVars.size(); ++v) s = s.substitute(Atom::iterator(kVars[v]), AffineExpr(p[v]));
    // elimination may leave symbolic atoms of the same name
    for (size_t v = 0; v < kVars.size(); ++v) s = s.substitute(Atom::symbolic(kVars[v]), AffineExpr(p[v]));
    return s.truth().value();
}

}  // namespace

// 10k random systems in a bounded box against exhaustive enumeration.
TEST(Presburger, RandomSystemsAgreeWithEnumeration) {
    std::mt19937_64 rng(2024);
    size_t unsat = 0, sat = 0;
    for (int t = 0; t < 10000; ++t) {
        Random r = random_system(rng);
        auto pts = points(r);
        CheckResult res = check(r.ls);
        ASSERT_NE(res.status, SatStatus::Unknown) << r.ls.to_string();
        if (res.unsat()) {
            ++unsat;
            ASSERT_TRUE(pts.empty()) << "claimed UNSAT with " << pts.size() << " points: " << r.ls.to_string();
        } else {
            ++sat;
            if (res.status == SatStatus::IntegerSatWitness) ASSERT_TRUE(r.ls.satisfied_by(res.witness)) << r.ls.to_string();
        }
        // the box is finite, so the decision must be exact
        ASSERT_EQ(res.unsat(), pts.empty()) << r.ls.to_string();
    }
    EXPECT_GT(unsat, 1000u);
    EXPECT_GT(sat, 1000u);
}

TEST(Presburger, EntailmentAndImpliedEqualitiesAreSound) {
    std::mt19937_64 rng(77);
    size_t equalities = 0;
    for (int t = 0; t < 1500; ++t) {
        Random r = random_system(rng);
        auto pts = points(r);
        if (pts.empty()) continue;
        for (const Constraint& e : implied_equalities(r.ls, {.exhaustive = true})) {
            ++equalities;
            for (const auto& p : pts) ASSERT_TRUE(satisfies(e, p)) << e.to_string() << " in " << r.ls.to_string();
        }
        std::uniform_int_distribution<int> coef(-2, 2), cst(-4, 4);
        AffineExpr probe(cst(rng));
        for (const auto& v : kVars) probe += AffineExpr(Atom::iterator(v), coef(rng));
        Constraint c = Constraint::geq(probe);
        if (entails(r.ls, c))
            for (const auto& p : pts) ASSERT_TRUE(satisfies(c, p)) << c.to_string() << " in " << r.ls.to_string();
    }
    EXPECT_GT(equalities, 0u);
}

TEST(Presburger, EliminationShadowContainsProjection) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 1000; ++t) {
        Random r = random_system(rng);
        Elimination e = eliminate(r.ls, "z");
        EXPECT_FALSE(e.system.index("z").has_value() && [&] {
            for (const auto& row : e.system.ineqs())
                if (row.at(*e.system.index("z")) != 0) return true;
            return false;
        }());
        for (const auto& p : points(r)) {
            std::map<std::string, BigInt> pt{{"x", p[0]}, {"y", p[1]}};
            ASSERT_TRUE(e.system.satisfied_by(pt)) << r.ls.to_string();
        }
    }
}

TEST(Presburger, ParityGapIsIntegerUnsat) {
    // 2x = 2y + 1
    LinearSystem ls({"x", "y"});
    LinearRow row;
    row.coef = {2, -2};
    row.constant = -1;
    ls.add_eq(row);
    EXPECT_TRUE(check(ls).unsat());
}

TEST(Presburger, RationalButNotIntegerSolution) {
    // 1 <= 3x <= 2
    LinearSystem ls({"x"});
    ls.add(Constraint::le(AffineExpr(1), AffineExpr(Atom::iterator("x"), 3)));
    ls.add(Constraint::le(AffineExpr(Atom::iterator("x"), 3), AffineExpr(2)));
    EXPECT_TRUE(check(ls).unsat());
}

TEST(Presburger, CertificateRecorded) {
    LinearSystem ls;
    Conjunction cycle = parse_conjunction("i < j && j < k && k <= i", {"i", "j", "k"});
    for (const auto& c : cycle.constraints()) ls.add(c);
    CheckResult r = check(ls, {.certificate = true});
    EXPECT_TRUE(r.unsat());
    EXPECT_FALSE(r.certificate.empty());
}

TEST(Presburger, AddRejectsCallAtoms) {
    LinearSystem ls;
    Conjunction c = parse_conjunction("f(i) <= i", {"i"});
    EXPECT_THROW(ls.add(c.constraints()[0]), std::invalid_argument);
}

TEST(Presburger, BigCoefficientsDoNotOverflow) {
    LinearSystem ls({"x", "y"});
    LinearRow a, b;
    a.coef = {BigInt("1000000000000000000000"), -1};
    a.constant = 0;
    b.coef = {BigInt("-1000000000000000000000"), 1};
    b.constant = -1;
    ls.add_geq(a);
    ls.add_geq(b);
    EXPECT_TRUE(check(ls).unsat());
}
