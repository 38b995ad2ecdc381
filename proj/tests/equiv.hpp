#pragma once

#include "shlide/normalize.hpp"
#include "shlide/oracle.hpp"

namespace testdata {

// A normalized branch together with the equalities it eliminated.
inline shlide::SymbolicHeap branch_formula(const shlide::NormBranch& b) {
    using namespace shlide;
    SymbolicHeap h = b.ent.lhs;
    for (const auto& [x, e] : b.elim) {
        bool arith = false;
        for (const auto& a : b.ent.lhs.pure)
            if (!a.is_pointer() && a.kind != AtomKind::False) {
                std::set<std::string> vs;
                collect_vars(a, vs);
                arith = arith || vs.count(x) > 0 || (e.is_var() && vs.count(e.name) > 0);
            }
        arith = arith || e.is_int();
        h.pure.push_back(arith ? PureAtom::aeq(Expr::var(x), e) : PureAtom::eq(Expr::var(x), e));
    }
    return h;
}

struct EquivResult {
    bool ok = true;
    std::string why;
    long models = 0;
};

// Checks that `lhs` and the disjunction of `branches` have the same models
// within the bound, enumerating both sides.
inline EquivResult branches_equivalent(const shlide::SymbolicHeap& lhs, const std::vector<shlide::NormBranch>& branches,
                                       const shlide::Registry& reg, const shlide::Bound& b) {
    using namespace shlide;
    EquivResult r;
    std::vector<SymbolicHeap> forms;
    for (const auto& br : branches)
        if (!br.inconsistent) forms.push_back(branch_formula(br));

    std::set<std::string> vars = free_vars(lhs);
    std::vector<std::string> stack(vars.begin(), vars.end());
    Entailment probe;
    probe.lhs = lhs;
    auto sorts = var_sorts(probe, reg);
    for (const auto& f : forms) {
        Entailment pf;
        pf.lhs = f;
        for (const auto& [v, p] : var_sorts(pf, reg)) sorts.emplace(v, p);
    }
    auto sat_some = [&](const HeapModel& m) {
        for (const auto& f : forms)
            if (eval(m, f, reg)) return true;
        return false;
    };
    for_each_model(lhs, stack, sorts, reg, b, false, [&](const HeapModel& m) {
        ++r.models;
        if (!sat_some(m)) {
            r.ok = false;
            r.why = "input model lost by normalization:\n" + to_string(m);
            return false;
        }
        return true;
    });
    for (const auto& f : forms) {
        if (!r.ok) break;
        for_each_model(f, stack, sorts, reg, b, false, [&](const HeapModel& m) {
            ++r.models;
            if (!eval(m, lhs, reg)) {
                r.ok = false;
                r.why = "branch model not a model of the input:\n" + to_string(m);
                return false;
            }
            return true;
        });
    }
    return r;
}

}  // namespace testdata
