#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equiv.hpp"
#include "helpers.hpp"

using namespace shlide;
using testdata::problem;

namespace {

Expr v(const char* n) { return Expr::var(n); }

std::string joined(const std::vector<std::string>& t) {
    std::string s;
    for (const auto& x : t) s += (s.empty() ? "" : ",") + x;
    return s;
}

}  // namespace

TEST_CASE("guard") {
    CHECK_FALSE(guard(SpatialAtom::points_to(v("x"), "c1", {v("y")})).has_value());
    CHECK(*guard(SpatialAtom::pred("ll", {v("x"), v("F")})) == PureAtom::neq(v("x"), v("F")));
}

TEST_CASE("is_nf") {
    SymbolicHeap a{{SpatialAtom::points_to(v("x"), "c", {v("y")})}, {PureAtom::neq(v("x"), Expr::null())}};
    CHECK(is_nf(a).ok);

    SymbolicHeap b{{SpatialAtom::points_to(v("x"), "c", {v("y")}), SpatialAtom::pred("P", {v("z"), v("F")})},
                   {PureAtom::neq(v("x"), Expr::null()), PureAtom::neq(v("z"), Expr::null()), PureAtom::neq(v("z"), v("F")),
                    PureAtom::neq(v("x"), v("z"))}};
    CHECK(is_nf(b).ok);

    SymbolicHeap c{{SpatialAtom::points_to(v("x"), "c", {v("y")})}, {PureAtom::eq(v("x"), v("w"))}};
    NfReport rc = is_nf(c);
    CHECK_FALSE(rc.ok);
    CHECK(std::find(rc.failed.begin(), rc.failed.end(), 4) != rc.failed.end());

    SymbolicHeap d{{}, {PureAtom::neq(v("x"), v("x"))}};
    NfReport rd = is_nf(d);
    CHECK(rd.failed == std::vector<int>{5});

    SymbolicHeap e{{}, {PureAtom::leq(Expr::lit(3), v("a")), PureAtom::leq(v("a"), Expr::lit(1))}};
    CHECK(is_nf(e).failed == std::vector<int>{6});
}

TEST_CASE("=L drops a trivial equality") {
    auto p = problem(testdata::LL, "emp /\\ x=x |- emp");
    auto br = normalize(p.query, p.reg);
    REQUIRE(br.size() == 1);
    CHECK(br[0].ent.lhs.pure.empty());
    CHECK(joined(br[0].trace) == "=L");
}

TEST_CASE("a lone predicate splits into base and recursive branch") {
    auto p = problem(testdata::LL, "ll(x, F) |- ll(x, F)");
    auto br = normalize(p.query, p.reg);
    REQUIRE(br.size() == 2);
    // the base branch substitutes and removes the occurrence
    CHECK(br[0].ent.lhs.spatial.empty());
    CHECK(br[0].elim.size() == 1);
    // the recursive branch keeps it guarded and non-null
    CHECK(br[1].ent.lhs.spatial.size() == 1);
    CHECK(contains(br[1].ent.lhs.pure, PureAtom::neq(v("x"), v("F"))));
    CHECK(contains(br[1].ent.lhs.pure, PureAtom::neq(v("x"), Expr::null())));
    CHECK(is_nf(br[1].ent.lhs).ok);

    auto eq = testdata::branches_equivalent(p.query.lhs, br, p.reg, Bound{3, 5, -3, 6});
    CHECK_MESSAGE(eq.ok, eq.why);
    CHECK(eq.models > 0);
}

TEST_CASE("X=null branch reduces by Subst then LBase") {
    // the second premise of the golden proof after LInd, restricted to X=null
    auto p = problem(testdata::LLS_LLB,
                     "x->c4(X, m1) * lls(X, null, m1, ma) /\\ x!=null /\\ mi<=m1 /\\ X=null |- llb(x, null, mi)");
    auto br = normalize(p.query, p.reg, {"x", "mi", "ma"});
    REQUIRE(br.size() == 1);
    CHECK(joined(br[0].trace).rfind("Subst,LBase", 0) == 0);
    CHECK(br[0].ent.lhs.spatial.size() == 1);
    CHECK(to_string(br[0].ent.lhs.spatial[0]) == "x->c4(null,ma)");
}

TEST_CASE("normalizing a normal form is the identity") {
    auto p = problem(testdata::LL, "x->c1(y) * ll(y, z) /\\ x!=null /\\ y!=null /\\ y!=z /\\ x!=y |- ll(x, z)");
    REQUIRE(is_nf(p.query.lhs).ok);
    auto br = normalize(p.query, p.reg);
    REQUIRE(br.size() == 1);
    CHECK(br[0].trace.empty());
    CHECK(to_string(br[0].ent) == to_string(p.query));
    auto again = normalize(br[0].ent, p.reg);
    REQUIRE(again.size() == 1);
    CHECK(to_string(again[0].ent) == to_string(br[0].ent));
}

TEST_CASE("every branch is in normal form or inconsistent") {
    auto p = problem(testdata::NLL, "nll(x, y, b) * ll(b, null) * ll(y, z) |- emp");
    auto br = normalize(p.query, p.reg);
    CHECK(br.size() >= 2);
    for (const auto& b : br) CHECK((b.inconsistent || is_nf(b.ent.lhs).ok));
    auto eq = testdata::branches_equivalent(p.query.lhs, br, p.reg, Bound{3, 5, -3, 6});
    CHECK_MESSAGE(eq.ok, eq.why);
}

TEST_CASE("LBase applies the order substitution") {
    auto p = problem(testdata::LLS_LLB, "lls(x, x, mi, ma) * y->c4(null, ma) |- y->c4(null, mi)");
    auto r = rule_lbase(p.query, p.reg);
    REQUIRE(r.has_value());
    REQUIRE(r->premises.size() == 1);
    CHECK(r->premises[0].lhs.spatial.size() == 1);
    CHECK(r->elims[0].size() == 1);
    CHECK(same_spatial(r->premises[0].lhs.spatial, r->premises[0].rhs.spatial));
}

TEST_CASE("ExM never splits a decided pair") {
    auto p = problem(testdata::LL, "ll(x, y) /\\ x!=y |- emp");
    auto r = rule_exm(p.query);
    CHECK_FALSE(r.has_value());
}
