#include "shlide/normalize.hpp"

#include "shlide/pure.hpp"

namespace shlide {

std::optional<PureAtom> guard(const SpatialAtom& a) {
    if (a.is_points_to()) return std::nullopt;
    return PureAtom::neq(a.root(), a.seg());
}

static bool guard_present(const SpatialAtom& a, const PureFormula& pi) {
    auto g = guard(a);
    return !g || contains(pi, *g);
}

NfReport is_nf(const SymbolicHeap& h) {
    NfReport r;
    auto fail = [&](int c) {
        if (r.failed.empty() || r.failed.back() != c) {
            bool seen = false;
            for (int x : r.failed) seen = seen || x == c;
            if (!seen) r.failed.push_back(c);
        }
        r.ok = false;
    };
    const auto& k = h.spatial;
    const auto& pi = h.pure;
    for (const auto& a : k) {
        if (!guard_present(a, pi)) fail(1);
        if (!contains(pi, PureAtom::neq(a.root(), Expr::null()))) fail(2);
    }
    for (size_t i = 0; i < k.size(); ++i)
        for (size_t j = i + 1; j < k.size(); ++j)
            if (!contains(pi, PureAtom::neq(k[i].root(), k[j].root()))) fail(3);
    PureFormula arith;
    for (const auto& a : pi) {
        if (a.kind == AtomKind::PtrEq) fail(4);
        if (a.kind == AtomKind::PtrNeq && a.lhs == a.rhs) fail(5);
        if (a.kind == AtomKind::ArithEq || a.kind == AtomKind::ArithLeq || a.kind == AtomKind::False) arith.push_back(a);
    }
    if (!satisfiable(arith)) fail(6);
    std::sort(r.failed.begin(), r.failed.end());
    return r;
}

static RuleResult single(std::string rule, Entailment e, Substitution elim = {}) {
    RuleResult r;
    r.rule = std::move(rule);
    r.premises.push_back(std::move(e));
    r.elims.push_back(std::move(elim));
    return r;
}

std::optional<RuleResult> rule_eq_l(const Entailment& e) {
    for (const auto& a : e.lhs.pure) {
        if ((a.kind == AtomKind::PtrEq || a.kind == AtomKind::ArithEq || a.kind == AtomKind::ArithLeq) && trivially_true(a)) {
            Entailment out = e;
            remove_atom(out.lhs.pure, a);
            return single("=L", std::move(out));
        }
    }
    return std::nullopt;
}

std::optional<RuleResult> rule_subst(const Entailment& e, const std::set<std::string>& params) {
    for (const auto& a : e.lhs.pure) {
        if (a.kind != AtomKind::PtrEq || a.lhs == a.rhs) continue;
        Expr x, by;
        if (a.lhs.is_null() || a.rhs.is_null()) {
            x = a.lhs.is_null() ? a.rhs : a.lhs;
            by = Expr::null();
        } else {
            bool pa = params.count(a.lhs.name) > 0, pb = params.count(a.rhs.name) > 0;
            bool replace_lhs;
            if (pa != pb) replace_lhs = pb;
            else replace_lhs = a.rhs.name < a.lhs.name;
            x = replace_lhs ? a.lhs : a.rhs;
            by = replace_lhs ? a.rhs : a.lhs;
        }
        if (!x.is_var()) continue;
        Entailment out = e;
        remove_atom(out.lhs.pure, a);
        Substitution s{{x.name, by}};
        out = substitute(out, s);
        return single("Subst", std::move(out), s);
    }
    return std::nullopt;
}

std::optional<RuleResult> rule_lbase(const Entailment& e, const Registry& reg) {
    for (size_t i = 0; i < e.lhs.spatial.size(); ++i) {
        const auto& a = e.lhs.spatial[i];
        if (!a.is_pred() || !(a.root() == a.seg())) continue;
        const InductiveDef& d = reg.def(a.name);
        Entailment out = e;
        out.lhs.spatial.erase(out.lhs.spatial.begin() + static_cast<long>(i));
        Substitution s;
        if (d.has_order()) {
            Expr sc = a.args[d.index_of(Role::OrderSource)];
            Expr tg = a.args[d.index_of(Role::OrderTarget)];
            if (!(sc == tg)) {
                if (sc.is_var()) s[sc.name] = tg;
                else if (tg.is_var()) s[tg.name] = sc;
                else add_atom(out.lhs.pure, PureAtom::aeq(sc, tg));
            }
        }
        if (!s.empty()) out = substitute(out, s);
        return single("LBase", std::move(out), s);
    }
    return std::nullopt;
}

std::optional<RuleResult> rule_neq_null(const Entailment& e) {
    Entailment out = e;
    bool changed = false;
    for (const auto& a : e.lhs.spatial)
        if (guard_present(a, e.lhs.pure)) changed |= add_atom(out.lhs.pure, PureAtom::neq(a.root(), Expr::null()));
    if (!changed) return std::nullopt;
    return single("NeqNull", std::move(out));
}

std::optional<RuleResult> rule_neq_star(const Entailment& e) {
    Entailment out = e;
    bool changed = false;
    const auto& k = e.lhs.spatial;
    for (size_t i = 0; i < k.size(); ++i) {
        if (!guard_present(k[i], e.lhs.pure)) continue;
        for (size_t j = i + 1; j < k.size(); ++j) {
            if (!guard_present(k[j], e.lhs.pure)) continue;
            changed |= add_atom(out.lhs.pure, PureAtom::neq(k[i].root(), k[j].root()));
        }
        // cells peeled off by Star are still allocated disjointly
        for (const auto& f : e.frame)
            if (guard_present(f, e.lhs.pure)) changed |= add_atom(out.lhs.pure, PureAtom::neq(k[i].root(), f.root()));
    }
    if (!changed) return std::nullopt;
    return single("NeqStar", std::move(out));
}

RuleResult exm_on(const Entailment& e, const Expr& a, const Expr& b) {
    RuleResult r;
    r.rule = "ExM";
    Entailment eq = e, ne = e;
    add_atom(eq.lhs.pure, PureAtom::eq(a, b));
    add_atom(ne.lhs.pure, PureAtom::neq(a, b));
    r.premises = {std::move(eq), std::move(ne)};
    r.elims = {{}, {}};
    return r;
}

std::optional<RuleResult> rule_exm(const Entailment& e) {
    PureState st(e.lhs.pure);
    for (const auto& a : e.lhs.spatial) {
        if (!a.is_pred() || a.root() == a.seg()) continue;
        if (st.status(a.root(), a.seg()) == PairStatus::Unknown) return exm_on(e, a.root(), a.seg());
    }
    // root-root pairs: only reachable when a guard is implied but not explicit
    const auto& k = e.lhs.spatial;
    for (size_t i = 0; i < k.size(); ++i)
        for (size_t j = i + 1; j < k.size(); ++j)
            if (!contains(e.lhs.pure, PureAtom::neq(k[i].root(), k[j].root())) &&
                st.status(k[i].root(), k[j].root()) == PairStatus::Unknown &&
                guard_present(k[i], e.lhs.pure) && guard_present(k[j], e.lhs.pure))
                return exm_on(e, k[i].root(), k[j].root());
    return std::nullopt;
}

Substitution compose_elim(const Substitution& acc, const Substitution& step) {
    Substitution out;
    for (const auto& [v, x] : acc) out[v] = substitute(x, step);
    for (const auto& [v, x] : step)
        if (!out.count(v)) out[v] = x;
    return out;
}

std::vector<NormBranch> normalize(const Entailment& e, const Registry& reg, const std::set<std::string>& params) {
    std::vector<NormBranch> done;
    std::vector<NormBranch> work{NormBranch{e, {}, {}, false}};
    while (!work.empty()) {
        NormBranch b = std::move(work.back());
        work.pop_back();
        if (!satisfiable(b.ent.lhs.pure)) {
            b.inconsistent = true;
            done.push_back(std::move(b));
            continue;
        }
        std::optional<RuleResult> r = rule_eq_l(b.ent);
        if (!r) r = rule_subst(b.ent, params);
        if (!r) r = rule_lbase(b.ent, reg);
        if (!r) r = rule_neq_null(b.ent);
        if (!r) r = rule_neq_star(b.ent);
        if (!r) r = rule_exm(b.ent);
        if (!r) {
            done.push_back(std::move(b));
            continue;
        }
        // push in reverse so the first premise is processed first
        for (size_t i = r->premises.size(); i-- > 0;) {
            NormBranch nb;
            nb.ent = std::move(r->premises[i]);
            nb.trace = b.trace;
            nb.trace.push_back(r->rule);
            nb.elim = compose_elim(b.elim, r->elims[i]);
            work.push_back(std::move(nb));
        }
    }
    return done;
}

}  // namespace shlide
