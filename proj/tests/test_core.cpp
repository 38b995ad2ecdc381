#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace shlide;
using testdata::problem;

namespace {

Expr v(const char* n) { return Expr::var(n); }

}  // namespace

TEST_CASE("ll is well-formed") {
    auto p = problem(testdata::LL, "emp |- emp");
    auto r = check_wellformed(p.reg.def("ll"), p.reg);
    CHECK(r.ok);
    const InductiveDef& d = p.reg.def("ll");
    CHECK(d.params.size() == 2);
    CHECK(d.params[0].role == Role::Root);
    CHECK(d.params[1].role == Role::Segment);
}

TEST_CASE("even-length list violates connectivity on X") {
    std::string text =
        "data c1 { c1 next; }\n"
        "pred ell(root r, seg F) := emp /\\ r=F \\/ exists x1, X. r->c1(x1) * x1->c1(X) * ell(X, F) /\\ r!=F;\n"
        "check emp |- emp;\n";
    try {
        parse_native(text);
        FAIL("expected a well-formedness error");
    } catch (const WellformednessError& e) {
        CHECK(e.report.condition == "C1");
        CHECK(e.report.witness == "X");
    }
}

TEST_CASE("mutual recursion violates termination") {
    std::string text =
        "data c1 { c1 next; c1 other; }\n"
        "pred p(root r, seg F) := emp /\\ r=F \\/ exists X, Y. r->c1(X, Y) * q(Y, F) * p(X, F) /\\ r!=F;\n"
        "pred q(root r, seg F) := emp /\\ r=F \\/ exists X, Y. r->c1(X, Y) * p(Y, F) * q(X, F) /\\ r!=F;\n"
        "check emp |- emp;\n";
    try {
        parse_native(text);
        FAIL("expected a well-formedness error");
    } catch (const WellformednessError& e) {
        CHECK(e.report.condition == "C3");
    }
}

TEST_CASE("substitute replaces simultaneously") {
    SymbolicHeap h{{SpatialAtom::points_to(v("x"), "c", {v("y")})}, {PureAtom::neq(v("x"), v("z"))}};
    SymbolicHeap r = substitute(h, {{"x", v("z")}});
    CHECK(to_string(r) == "z->c(y) /\\ z!=z");

    SymbolicHeap e;
    CHECK(to_string(substitute(e, {{"x", v("y")}})) == to_string(e));

    SpatialAtom occ = SpatialAtom::pred("lls", {v("X"), Expr::null(), v("m'"), v("ma")}, 1);
    SpatialAtom o2 = substitute(occ, {{"X", v("x")}, {"m'", v("mi")}});
    CHECK(to_string(o2) == "lls(x,null,mi,ma)^1");
    CHECK(o2.unfold == 1);

    // swap is simultaneous, not sequential
    SpatialAtom sw = substitute(SpatialAtom::pred("ll", {v("a"), v("b")}), {{"a", v("b")}, {"b", v("a")}});
    CHECK(to_string(sw) == "ll(b,a)^0");
}

TEST_CASE("substitute is idempotent for idempotent substitutions") {
    SymbolicHeap h{{SpatialAtom::pred("ll", {v("x"), v("y")}), SpatialAtom::points_to(v("y"), "c1", {v("z")})},
                   {PureAtom::neq(v("x"), v("y"))}};
    Substitution s{{"x", v("z")}, {"y", Expr::null()}};
    CHECK(to_string(substitute(substitute(h, s), s)) == to_string(substitute(h, s)));
}

TEST_CASE("unfold lls gives the recursive branch with k+1") {
    auto p = problem(testdata::LLS_LLB, "emp |- emp");
    FreshNames fn;
    SpatialAtom occ = SpatialAtom::pred("lls", {v("x"), Expr::null(), v("mi"), v("ma")}, 0);
    Unfolding u = unfold(occ, p.reg, fn);
    REQUIRE(u.rec.spatial.size() == 2);
    const SpatialAtom& pt = u.rec.spatial[0];
    const SpatialAtom& rec = u.rec.spatial[1];
    CHECK(pt.is_points_to());
    CHECK(pt.root() == v("x"));
    CHECK(rec.unfold == 1);
    CHECK(rec.args[1] == Expr::null());
    CHECK(rec.args[0] == pt.args[0]);
    CHECK(rec.args[2] == pt.args[1]);
    CHECK(contains(u.rec.pure, PureAtom::neq(v("x"), Expr::null())));
    CHECK(contains(u.rec.pure, PureAtom::leq(v("mi"), pt.args[1])));
    // fresh witnesses never clash with the input
    CHECK(pt.args[0].name != "x");
    CHECK(pt.args[0].name.find('#') != std::string::npos);
}

TEST_CASE("unfold base branch of ll(x,x)") {
    auto p = problem(testdata::LL, "emp |- emp");
    FreshNames fn;
    Unfolding u = unfold(SpatialAtom::pred("ll", {v("x"), v("x")}), p.reg, fn);
    CHECK(u.base.spatial.empty());
    for (const auto& a : u.base.pure) CHECK(trivially_true(a));
}

TEST_CASE("unfold nll gives matrix occurrences with k=0") {
    auto p = problem(testdata::NLL, "emp |- emp");
    FreshNames fn;
    Unfolding u = unfold(SpatialAtom::pred("nll", {v("x"), v("F"), v("B")}, 0), p.reg, fn);
    int rec = 0, nested = 0;
    for (const auto& a : u.rec.spatial) {
        if (a.is_pred() && a.name == "nll") {
            ++rec;
            CHECK(a.unfold == 1);
        }
        if (a.is_pred() && a.name == "ll") {
            ++nested;
            CHECK(a.unfold == 0);
            CHECK(a.args[1] == v("B"));
        }
    }
    CHECK(rec == 1);
    CHECK(nested == 1);
    CHECK(contains(u.rec.pure, PureAtom::neq(v("x"), v("F"))));
}

TEST_CASE("fresh names are distinct across unfoldings") {
    auto p = problem(testdata::LL, "emp |- emp");
    FreshNames fn;
    Unfolding a = unfold(SpatialAtom::pred("ll", {v("x"), v("y")}), p.reg, fn);
    Unfolding b = unfold(SpatialAtom::pred("ll", {v("x"), v("y")}), p.reg, fn);
    CHECK(free_vars(a.rec) != free_vars(b.rec));
}

TEST_CASE("roots") {
    CHECK(roots({}).empty());
    Spatial k{SpatialAtom::points_to(v("x"), "c", {v("y")}), SpatialAtom::pred("P", {v("z"), v("F")})};
    CHECK(roots(k) == std::set<Expr>{v("x"), v("z")});
    Spatial k2{SpatialAtom::pred("P", {v("x"), v("F")}), SpatialAtom::pred("Q", {v("x"), v("G")})};
    CHECK(roots(k2) == std::set<Expr>{v("x")});
}
