#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shlide/pure.hpp"

#include <random>

using namespace shlide;

namespace {

Expr v(const char* n) { return Expr::var(n); }

// Brute-force evaluation of arithmetic atoms over a finite domain.
bool holds(const PureAtom& a, const std::map<std::string, long>& m) {
    auto val = [&](const Expr& e) { return e.is_int() ? static_cast<long>(e.value) : m.at(e.name); };
    switch (a.kind) {
        case AtomKind::ArithEq: return val(a.lhs) == val(a.rhs);
        case AtomKind::ArithLeq: return val(a.lhs) <= val(a.rhs);
        case AtomKind::False: return false;
        default: break;
    }
    throw std::logic_error("pointer atom in arithmetic brute force");
}

template <class F>
void each_assignment(const std::vector<std::string>& vars, long lo, long hi, F f) {
    std::map<std::string, long> m;
    std::function<void(size_t)> go = [&](size_t i) {
        if (i == vars.size()) {
            f(m);
            return;
        }
        for (long x = lo; x <= hi; ++x) {
            m[vars[i]] = x;
            go(i + 1);
        }
    };
    go(0);
}

}  // namespace

TEST_CASE("satisfiable") {
    CHECK_FALSE(satisfiable({PureAtom::eq(v("x"), v("y")), PureAtom::neq(v("x"), v("y"))}));
    CHECK(satisfiable({PureAtom::leq(v("mi"), v("m'")), PureAtom::leq(v("m'"), v("ma"))}));
    PureFormula bad{PureAtom::leq(v("a"), Expr::lit(5)), PureAtom::leq(Expr::lit(7), v("a"))};
    CHECK_FALSE(satisfiable(bad));
    bool found = false;
    each_assignment({"a"}, -10, 10, [&](const auto& m) { found |= holds(bad[0], m) && holds(bad[1], m); });
    CHECK_FALSE(found);
    CHECK_FALSE(satisfiable({PureAtom::neq(v("x"), v("x"))}));
    CHECK(satisfiable({}));
}

TEST_CASE("entails") {
    CHECK(entails({PureAtom::leq(v("mi"), v("ma"))}, {PureAtom::leq(v("mi"), v("ma"))}));
    CHECK(entails({PureAtom::neq(v("x"), Expr::null()), PureAtom::leq(v("mi"), v("m'"))}, {PureAtom::leq(v("mi"), v("m'"))}));
    CHECK_FALSE(entails({}, {PureAtom::neq(v("x"), v("y"))}));
    CHECK(entails({PureAtom::leq(v("a"), v("b")), PureAtom::leq(v("b"), v("c"))}, {PureAtom::leq(v("a"), v("c"))}));
    CHECK(entails({PureAtom::leq(v("a"), v("b")), PureAtom::leq(v("b"), v("a"))}, {PureAtom::aeq(v("a"), v("b"))}));
    CHECK(entails({PureAtom::eq(v("x"), v("y")), PureAtom::neq(v("y"), v("z"))}, {PureAtom::neq(v("x"), v("z"))}));
}

TEST_CASE("status of pair") {
    CHECK(status_of_pair({PureAtom::eq(v("x"), v("y"))}, v("x"), v("y")) == PairStatus::Equal);
    CHECK(status_of_pair({PureAtom::neq(v("x"), Expr::null())}, v("x"), Expr::null()) == PairStatus::Distinct);
    CHECK(status_of_pair({}, v("x"), v("y")) == PairStatus::Unknown);
}

TEST_CASE("congruence after asserting an equality") {
    PureFormula base{PureAtom::neq(v("y"), v("z"))};
    PureFormula with = base;
    with.push_back(PureAtom::eq(v("x"), v("y")));
    CHECK(status_of_pair(with, v("x"), v("z")) == status_of_pair(with, v("y"), v("z")));
}

TEST_CASE("arithmetic entailment agrees with brute force on random formulas") {
    std::mt19937 rng(12345);
    std::vector<std::string> names{"a", "b", "c", "d"};
    auto term = [&]() -> Expr {
        int r = static_cast<int>(rng() % 6);
        if (r < 4) return Expr::var(names[static_cast<size_t>(r)]);
        return Expr::lit(static_cast<long>(rng() % 7));
    };
    auto atom = [&]() {
        Expr l = term(), r = term();
        return (rng() % 4 == 0) ? PureAtom::aeq(l, r) : PureAtom::leq(l, r);
    };
    int checked = 0;
    for (int it = 0; it < 400; ++it) {
        PureFormula pi;
        int n = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) pi.push_back(atom());
        PureAtom goal = atom();
        bool sat_bf = false, ent_bf = true;
        each_assignment(names, -1, 7, [&](const auto& m) {
            bool ok = true;
            for (const auto& a : pi) ok = ok && holds(a, m);
            if (!ok) return;
            sat_bf = true;
            if (!holds(goal, m)) ent_bf = false;
        });
        // literals lie in [0,6]; clamping any integer model to [-1,7] keeps every atom's
        // truth value, so this finite enumeration is exact
        std::string msg = to_string(pi) + " |= " + to_string(goal);
        CHECK_MESSAGE(satisfiable(pi) == sat_bf, msg);
        CHECK_MESSAGE(entails(pi, {goal}) == ent_bf, msg);
        ++checked;
    }
    CHECK(checked == 400);
}

TEST_CASE("satisfiability is monotone") {
    std::mt19937 rng(7);
    std::vector<PureAtom> pool{PureAtom::leq(v("a"), v("b")), PureAtom::leq(v("b"), v("c")), PureAtom::leq(v("c"), v("a")),
                               PureAtom::leq(Expr::lit(3), v("a")), PureAtom::leq(v("c"), Expr::lit(2)),
                               PureAtom::eq(v("x"), v("y")), PureAtom::neq(v("x"), v("y"))};
    for (int it = 0; it < 200; ++it) {
        PureFormula pi;
        for (int i = 0; i < 4; ++i) {
            bool before = satisfiable(pi);
            pi.push_back(pool[rng() % pool.size()]);
            if (!before) CHECK_FALSE(satisfiable(pi));
        }
    }
}
