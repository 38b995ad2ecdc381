#include "frontend_internal.hpp"

#include <algorithm>

namespace shlide::detail {

void SortEnv::note(const Expr& e, bool ptr) {
    if (e.is_null() && !ptr) throw ParseError("null used as an integer", line_, col_);
    if (e.is_int() && ptr) throw ParseError("integer " + to_string(e) + " used as a pointer", line_, col_);
    if (!e.is_var()) return;
    auto [it, fresh] = m_.emplace(e.name, ptr);
    if (!fresh && it->second != ptr)
        throw ParseError("variable " + e.name + " used both as a pointer and as an integer", line_, col_);
}

std::optional<bool> SortEnv::get(const Expr& e) const {
    if (e.is_null()) return true;
    if (e.is_int()) return false;
    auto it = m_.find(e.name);
    if (it == m_.end()) return std::nullopt;
    return it->second;
}

namespace {

void note_spatial(const Spatial& k, const Registry& reg, SortEnv& env, bool defs_final) {
    for (const auto& a : k) {
        if (a.is_points_to()) {
            env.note(a.root_expr, true);
            auto it = reg.sorts.find(a.name);
            if (it == reg.sorts.end()) continue;
            for (size_t j = 0; j < a.args.size() && j < it->second.fields.size(); ++j)
                env.note(a.args[j], it->second.fields[j].is_pointer());
        } else if (defs_final) {
            auto it = reg.defs.find(a.name);
            if (it == reg.defs.end()) continue;
            for (size_t j = 0; j < a.args.size() && j < it->second.param_pointer.size(); ++j)
                env.note(a.args[j], it->second.param_pointer[j]);
        }
    }
}

void note_order_atoms(const std::vector<RawAtom>& pure, SortEnv& env) {
    for (const auto& a : pure)
        if (a.op == RawAtom::Op::Le || a.op == RawAtom::Op::Ge) {
            env.note(a.lhs, false);
            env.note(a.rhs, false);
        }
}

PureAtom type_atom(const RawAtom& a, SortEnv& env) {
    switch (a.op) {
        case RawAtom::Op::False: return PureAtom::falsum();
        case RawAtom::Op::Le: return PureAtom::leq(a.lhs, a.rhs);
        case RawAtom::Op::Ge: return PureAtom::leq(a.rhs, a.lhs);
        case RawAtom::Op::Eq:
        case RawAtom::Op::Neq: break;
    }
    auto l = env.get(a.lhs), r = env.get(a.rhs);
    bool ptr = l ? *l : (r ? *r : true);
    env.note(a.lhs, ptr);
    env.note(a.rhs, ptr);
    if (a.op == RawAtom::Op::Neq) {
        if (!ptr) throw ParseError("integer disequality is not supported", a.line, a.col);
        return PureAtom::neq(a.lhs, a.rhs);
    }
    return ptr ? PureAtom::eq(a.lhs, a.rhs) : PureAtom::aeq(a.lhs, a.rhs);
}

bool mentions_only(const PureAtom& a, const std::string& x, const std::string& y) {
    if (!a.lhs.is_var() || !a.rhs.is_var()) return false;
    return (a.lhs.name == x && a.rhs.name == y) || (a.lhs.name == y && a.rhs.name == x);
}

}  // namespace

InductiveDef build_def(const RawDef& rd, const Registry& reg) {
    InductiveDef d;
    d.name = rd.name;
    d.params = rd.params;
    d.exists = rd.exists;
    SortEnv env(rd.line, rd.col);
    for (const auto& [v, p] : rd.declared) env.note(Expr::var(v), p);
    for (const auto& p : d.params) {
        if (p.role == Role::Root || p.role == Role::Segment || p.role == Role::Border) env.note(Expr::var(p.name), true);
        if (p.role == Role::OrderSource || p.role == Role::OrderTarget) env.note(Expr::var(p.name), false);
    }
    int ir = d.index_of(Role::Root), is = d.index_of(Role::Segment);
    if (ir < 0 || is < 0) throw RoleAnnotationMissing(d.name + " needs a root and a segment parameter");
    Expr r = Expr::var(d.root_param()), f = Expr::var(d.seg_param());

    // split the recursive branch into head, matrix and recursive occurrence
    int head = -1, rec = -1;
    for (size_t i = 0; i < rd.rec.spatial.size(); ++i) {
        const auto& a = rd.rec.spatial[i];
        if (a.is_points_to() && a.root_expr == r && head < 0) head = static_cast<int>(i);
        if (a.is_pred() && a.name == d.name && a.root().is_var() &&
            std::find(d.exists.begin(), d.exists.end(), a.root().name) != d.exists.end())
            rec = static_cast<int>(i);
    }
    if (head >= 0) d.head = rd.rec.spatial[head];
    else d.head = SpatialAtom::points_to(Expr::null(), "", {});
    if (rec >= 0) d.rec = rd.rec.spatial[rec];
    else d.rec = SpatialAtom::points_to(Expr::null(), "", {});
    for (size_t i = 0; i < rd.rec.spatial.size(); ++i)
        if (static_cast<int>(i) != head && static_cast<int>(i) != rec) d.matrix.push_back(rd.rec.spatial[i]);

    note_spatial(rd.rec.spatial, reg, env, false);
    note_order_atoms(rd.rec.pure, env);
    note_order_atoms(rd.base.pure, env);

    std::string sc, tg;
    if (d.has_order()) {
        sc = d.params[d.index_of(Role::OrderSource)].name;
        tg = d.params[d.index_of(Role::OrderTarget)].name;
        if (rec >= 0 && d.rec.args.size() == d.params.size() && d.rec.args[d.index_of(Role::OrderSource)].is_var())
            d.order_next = d.rec.args[d.index_of(Role::OrderSource)].name;
    }

    for (const auto& ra : rd.rec.pure) {
        PureAtom a = type_atom(ra, env);
        if (a == PureAtom::neq(r, f)) continue;
        if (!d.order_next.empty() && !a.is_pointer() && a.kind != AtomKind::False && mentions_only(a, sc, d.order_next) &&
            !d.order_op) {
            if (a.kind == AtomKind::ArithEq) d.order_op = OrderOp::Eq;
            else d.order_op = (a.lhs.name == sc) ? OrderOp::Le : OrderOp::Ge;
            continue;
        }
        add_atom(d.arith_side, a);
    }

    if (!rd.base.spatial.empty())
        throw ParseError("base branch of " + d.name + " must have an empty heap", rd.line, rd.col);
    bool seen_rf = false, seen_order = false;
    for (const auto& ra : rd.base.pure) {
        PureAtom a = type_atom(ra, env);
        if (a == PureAtom::eq(r, f)) seen_rf = true;
        else if (d.has_order() && a == PureAtom::aeq(Expr::var(sc), Expr::var(tg))) seen_order = true;
        else throw ParseError("unexpected constraint " + to_string(a) + " in the base branch of " + d.name, ra.line, ra.col);
    }
    if (!seen_rf) throw ParseError("base branch of " + d.name + " must state " + to_string(PureAtom::eq(r, f)), rd.line, rd.col);
    if (d.has_order() && !seen_order)
        throw ParseError("base branch of " + d.name + " must equate its order source and target", rd.line, rd.col);
    return d;
}

Entailment build_query(const RawHeap& lhs, const RawHeap& rhs, const Registry& reg,
                       const std::map<std::string, bool>& declared, int line, int col) {
    SortEnv env(line, col);
    for (const auto& [v, p] : declared) env.note(Expr::var(v), p);
    for (const Spatial* k : {&lhs.spatial, &rhs.spatial})
        for (const auto& a : *k) {
            if (a.is_pred() && !reg.has_def(a.name)) throw ParseError("unknown predicate " + a.name, line, col);
            if (a.is_pred() && reg.def(a.name).params.size() != a.args.size())
                throw ParseError("wrong number of arguments for " + a.name, line, col);
            if (a.is_points_to()) {
                auto it = reg.sorts.find(a.name);
                if (it == reg.sorts.end()) throw ParseError("unknown sort " + a.name, line, col);
                if (it->second.fields.size() != a.args.size()) throw ParseError("wrong number of fields for " + a.name, line, col);
            }
        }
    note_spatial(lhs.spatial, reg, env, true);
    note_spatial(rhs.spatial, reg, env, true);
    note_order_atoms(lhs.pure, env);
    note_order_atoms(rhs.pure, env);
    Entailment e;
    e.lhs.spatial = lhs.spatial;
    e.rhs.spatial = rhs.spatial;
    for (const auto& a : lhs.pure) add_atom(e.lhs.pure, type_atom(a, env));
    for (const auto& a : rhs.pure) add_atom(e.rhs.pure, type_atom(a, env));
    return e;
}

void finish_registry(Registry& reg) {
    reg.finalize();
    for (const auto& n : reg.def_order) {
        const InductiveDef& d = reg.def(n);
        WellformedReport w = check_wellformed(d, reg);
        if (!w.ok) throw WellformednessError(n, w);
    }
}

}  // namespace shlide::detail
