#include "shlide/registry.hpp"

#include <algorithm>
#include <functional>

namespace shlide {

std::string to_string(Role r) {
    switch (r) {
        case Role::Root: return "root";
        case Role::Segment: return "seg";
        case Role::Border: return "border";
        case Role::Transitivity: return "trans";
        case Role::OrderSource: return "src";
        case Role::OrderTarget: return "tgt";
    }
    return "?";
}

int InductiveDef::index_of(Role r) const {
    for (size_t i = 0; i < params.size(); ++i)
        if (params[i].role == r) return static_cast<int>(i);
    return -1;
}

const InductiveDef& Registry::def(const std::string& name) const {
    auto it = defs.find(name);
    if (it == defs.end()) throw UnknownPredicate("unknown predicate '" + name + "'");
    return it->second;
}

const SortDecl& Registry::sort(const std::string& name) const {
    auto it = sorts.find(name);
    if (it == sorts.end()) throw std::runtime_error("unknown sort '" + name + "'");
    return it->second;
}

void Registry::add_sort(SortDecl s) {
    std::string n = s.name;
    sorts[n] = std::move(s);
}

void Registry::add_def(InductiveDef d) {
    std::string n = d.name;
    if (!defs.count(n)) def_order.push_back(n);
    defs[n] = std::move(d);
}

void Registry::finalize() {
    // 0 unknown, 1 pointer, 2 data
    std::map<std::string, std::vector<int>> st;
    for (auto& [n, d] : defs) {
        auto& v = st[n];
        v.assign(d.params.size(), 0);
        for (size_t i = 0; i < d.params.size(); ++i) {
            Role r = d.params[i].role;
            if (r == Role::Root || r == Role::Segment || r == Role::Border) v[i] = 1;
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [n, d] : defs) {
            auto& v = st[n];
            std::map<std::string, int> local;
            for (size_t i = 0; i < d.params.size(); ++i)
                if (v[i]) local[d.params[i].name] = v[i];
            auto note = [&](const Expr& e, int s) {
                if (!e.is_var() || !s) return;
                if (!local.count(e.name)) local[e.name] = s;
            };
            auto scan_atom = [&](const SpatialAtom& a) {
                if (a.is_points_to()) {
                    note(a.root_expr, 1);
                    auto sit = sorts.find(a.name);
                    if (sit != sorts.end())
                        for (size_t j = 0; j < a.args.size() && j < sit->second.fields.size(); ++j)
                            note(a.args[j], sit->second.fields[j].is_pointer() ? 1 : 2);
                } else {
                    auto dit = st.find(a.name);
                    if (dit != st.end())
                        for (size_t j = 0; j < a.args.size() && j < dit->second.size(); ++j)
                            note(a.args[j], dit->second[j]);
                }
            };
            scan_atom(d.head);
            for (const auto& a : d.matrix) scan_atom(a);
            scan_atom(d.rec);
            for (const auto& a : d.arith_side) {
                int s = a.is_pointer() ? 1 : 2;
                note(a.lhs, s);
                note(a.rhs, s);
            }
            // the order pair and its successor are data by default
            for (size_t i = 0; i < d.params.size(); ++i) {
                if (v[i]) continue;
                auto it = local.find(d.params[i].name);
                if (it != local.end()) {
                    v[i] = it->second;
                    changed = true;
                }
            }
            // arguments of nested occurrences propagate back to callee params
            auto push = [&](const SpatialAtom& a) {
                if (!a.is_pred()) return;
                auto dit = st.find(a.name);
                if (dit == st.end()) return;
                for (size_t j = 0; j < a.args.size() && j < dit->second.size(); ++j) {
                    if (dit->second[j] || !a.args[j].is_var()) continue;
                    auto it = local.find(a.args[j].name);
                    if (it != local.end()) {
                        dit->second[j] = it->second;
                        changed = true;
                    }
                }
            };
            for (const auto& a : d.matrix) push(a);
            push(d.rec);
        }
    }
    for (auto& [n, d] : defs) {
        d.param_pointer.clear();
        for (int s : st[n]) d.param_pointer.push_back(s == 1);
    }
}

static bool is_head_field(const InductiveDef& d, const std::string& v) {
    for (const auto& f : d.head.args)
        if (f.is_var() && f.name == v) return true;
    return false;
}

WellformedReport check_wellformed(const InductiveDef& d, const Registry& reg) {
    auto fail = [](std::string c, std::string w, std::string m) {
        return WellformedReport{false, std::move(c), std::move(w), std::move(m)};
    };
    for (const auto& a : d.matrix)
        if (a.is_pred() && !reg.has_def(a.name)) throw UnknownPredicate("unknown predicate '" + a.name + "' in " + d.name);

    int nroot = 0, nseg = 0, ntrans = 0, nsrc = 0, ntgt = 0;
    for (const auto& p : d.params) {
        switch (p.role) {
            case Role::Root: ++nroot; break;
            case Role::Segment: ++nseg; break;
            case Role::Transitivity: ++ntrans; break;
            case Role::OrderSource: ++nsrc; break;
            case Role::OrderTarget: ++ntgt; break;
            default: break;
        }
    }
    if (nroot != 1 || nseg != 1) return fail("Shape", d.name, "exactly one root and one segment parameter required");
    if (ntrans > 1) return fail("Shape", d.name, "at most one transitivity parameter");
    if (nsrc != ntgt || nsrc > 1) return fail("Shape", d.name, "ordering parameters must come as one source/target pair");
    if (!d.head.is_points_to() || !(d.head.root_expr == Expr::var(d.root_param())))
        return fail("Shape", d.name, "recursive branch must allocate the root");
    auto sit = reg.sorts.find(d.head.name);
    if (sit == reg.sorts.end()) return fail("Shape", d.head.name, "unknown sort");
    if (sit->second.fields.size() != d.head.args.size()) return fail("Shape", d.head.name, "field arity mismatch");
    if (!d.rec.is_pred() || d.rec.name != d.name || d.rec.args.size() != d.params.size())
        return fail("Shape", d.name, "missing recursive occurrence");
    for (size_t i = 0; i < d.params.size(); ++i) {
        Role r = d.params[i].role;
        const Expr& a = d.rec.args[i];
        if (r == Role::Root) {
            if (!a.is_var() || std::find(d.exists.begin(), d.exists.end(), a.name) == d.exists.end())
                return fail("Shape", to_string(a), "recursive occurrence must be rooted at an existential");
        } else if (r == Role::OrderSource) {
            if (!a.is_var() || a.name != d.order_next) return fail("Shape", to_string(a), "order source must advance to sc'");
        } else if (!(a == Expr::var(d.params[i].name))) {
            return fail("Shape", to_string(a), "recursive occurrence must pass " + d.params[i].name + " unchanged");
        }
    }
    if (d.has_order() && !d.order_op) return fail("Shape", d.name, "ordering pair without an order atom");

    // C1: existentials other than the order successor are head fields.
    for (const auto& e : d.exists) {
        if (d.has_order() && e == d.order_next) continue;
        if (!is_head_field(d, e)) return fail("C1", e, "existential " + e + " is not a field of the root cell");
    }
    // C2: nested occurrences hang off head fields and do not capture other existentials.
    for (const auto& a : d.matrix) {
        if (!a.is_pred()) return fail("C2", to_string(a.root()), "matrix may only contain predicate occurrences");
        if (!a.root().is_var() || !is_head_field(d, a.root().name))
            return fail("C2", to_string(a.root()), "nested root is not a field of the root cell");
        for (size_t j = 1; j < a.args.size(); ++j) {
            const Expr& u = a.args[j];
            if (!u.is_var() || is_head_field(d, u.name)) continue;
            if (std::find(d.exists.begin(), d.exists.end(), u.name) != d.exists.end())
                return fail("C2", u.name, "argument " + u.name + " is an unallocated existential");
        }
    }
    // C3: no mutual recursion through the dependency order.
    std::set<std::string> seen;
    std::function<bool(const std::string&)> reaches = [&](const std::string& p) -> bool {
        if (!seen.insert(p).second) return false;
        auto it = reg.defs.find(p);
        if (it == reg.defs.end()) return false;
        for (const auto& a : it->second.matrix) {
            if (!a.is_pred()) continue;
            if (a.name == d.name && p != d.name) return true;
            if (a.name != p && reaches(a.name)) return true;
        }
        return false;
    };
    for (const auto& a : d.matrix) {
        if (!a.is_pred() || a.name == d.name) continue;
        seen.clear();
        if (reaches(a.name)) return fail("C3", a.name, d.name + " and " + a.name + " are mutually recursive");
    }
    return {};
}

std::string FreshNames::fresh(const std::string& base) {
    std::string b = base.substr(0, base.find('#'));
    return b + "#" + std::to_string(++counter_);
}

static Substitution param_subst(const InductiveDef& d, const SpatialAtom& occ) {
    if (occ.args.size() != d.params.size()) throw std::runtime_error("arity mismatch for " + d.name);
    Substitution s;
    for (size_t i = 0; i < d.params.size(); ++i) s[d.params[i].name] = occ.args[i];
    return s;
}

SymbolicHeap instantiate_rec(const InductiveDef& d, const SpatialAtom& occ, const Substitution& ex) {
    Substitution s = param_subst(d, occ);
    for (const auto& [k, v] : ex) s[k] = v;
    SymbolicHeap h;
    h.spatial.push_back(substitute(d.head, s));
    for (const auto& m : d.matrix) {
        SpatialAtom a = substitute(m, s);
        a.unfold = (a.name == d.name) ? occ.unfold + 1 : 0;
        a.occ = -1;
        h.spatial.push_back(a);
    }
    SpatialAtom r = substitute(d.rec, s);
    r.unfold = occ.unfold + 1;
    r.occ = -1;
    h.spatial.push_back(r);
    add_atom(h.pure, PureAtom::neq(substitute(Expr::var(d.root_param()), s), substitute(Expr::var(d.seg_param()), s)));
    if (d.has_order() && d.order_op) {
        Expr sc = substitute(Expr::var(d.params[d.index_of(Role::OrderSource)].name), s);
        Expr nx = substitute(Expr::var(d.order_next), s);
        switch (*d.order_op) {
            case OrderOp::Eq: add_atom(h.pure, PureAtom::aeq(sc, nx)); break;
            case OrderOp::Le: add_atom(h.pure, PureAtom::leq(sc, nx)); break;
            case OrderOp::Ge: add_atom(h.pure, PureAtom::leq(nx, sc)); break;
        }
    }
    for (const auto& a : d.arith_side) add_atom(h.pure, substitute(a, s));
    return h;
}

Unfolding unfold(const SpatialAtom& occ, const Registry& reg, FreshNames& fresh) {
    if (!occ.is_pred()) throw std::runtime_error("unfold expects a predicate occurrence");
    const InductiveDef& d = reg.def(occ.name);
    Substitution ps = param_subst(d, occ);
    Unfolding u;
    add_atom(u.base.pure, PureAtom::eq(ps.at(d.root_param()), ps.at(d.seg_param())));
    if (d.has_order()) {
        add_atom(u.base.pure, PureAtom::aeq(ps.at(d.params[d.index_of(Role::OrderSource)].name),
                                            ps.at(d.params[d.index_of(Role::OrderTarget)].name)));
    }
    Substitution ex;
    for (const auto& e : d.exists) ex[e] = Expr::var(fresh.fresh(e));
    u.rec = instantiate_rec(d, occ, ex);
    return u;
}

std::optional<PureAtom> implied_order(const SpatialAtom& occ, const Registry& reg) {
    if (!occ.is_pred()) return std::nullopt;
    const InductiveDef& d = reg.def(occ.name);
    if (!d.has_order() || !d.order_op) return std::nullopt;
    const Expr& sc = occ.args[d.index_of(Role::OrderSource)];
    const Expr& tg = occ.args[d.index_of(Role::OrderTarget)];
    switch (*d.order_op) {
        case OrderOp::Eq: return PureAtom::aeq(sc, tg);
        case OrderOp::Le: return PureAtom::leq(sc, tg);
        case OrderOp::Ge: return PureAtom::leq(tg, sc);
    }
    return std::nullopt;
}

std::set<Expr> roots(const Spatial& k) {
    std::set<Expr> out;
    for (const auto& a : k) out.insert(a.root());
    return out;
}

static void note_sorts(const Spatial& k, const PureFormula& p, const Registry& reg, std::map<std::string, bool>& out) {
    auto note = [&](const Expr& e, bool ptr) {
        if (e.is_var()) out.emplace(e.name, ptr);
    };
    for (const auto& a : k) {
        if (a.is_points_to()) {
            note(a.root_expr, true);
            auto it = reg.sorts.find(a.name);
            if (it != reg.sorts.end())
                for (size_t j = 0; j < a.args.size() && j < it->second.fields.size(); ++j)
                    note(a.args[j], it->second.fields[j].is_pointer());
        } else {
            auto it = reg.defs.find(a.name);
            if (it != reg.defs.end())
                for (size_t j = 0; j < a.args.size() && j < it->second.param_pointer.size(); ++j)
                    note(a.args[j], it->second.param_pointer[j]);
        }
    }
    for (const auto& a : p) {
        if (a.kind == AtomKind::False) continue;
        note(a.lhs, a.is_pointer());
        note(a.rhs, a.is_pointer());
    }
}

std::map<std::string, bool> var_sorts(const SymbolicHeap& h, const Registry& reg) {
    std::map<std::string, bool> out;
    note_sorts(h.spatial, h.pure, reg, out);
    return out;
}

std::map<std::string, bool> var_sorts(const Entailment& e, const Registry& reg) {
    std::map<std::string, bool> out;
    note_sorts(e.lhs.spatial, e.lhs.pure, reg, out);
    note_sorts(e.rhs.spatial, e.rhs.pure, reg, out);
    note_sorts(e.frame, {}, reg, out);
    return out;
}

}  // namespace shlide
