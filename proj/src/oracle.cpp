#include "shlide/oracle.hpp"

#include "shlide/pure.hpp"

#include <algorithm>
#include <sstream>

namespace shlide {

namespace {

using Env = std::map<std::string, Value>;

std::optional<Value> value_of(const Expr& e, const Env& env) {
    switch (e.kind) {
        case Expr::Kind::Null: return Value::null();
        case Expr::Kind::Int: return Value::num(e.value);
        case Expr::Kind::Var: {
            auto it = env.find(e.name);
            if (it == env.end()) return std::nullopt;
            return it->second;
        }
    }
    return std::nullopt;
}

// 1 true, 0 false, -1 not yet decidable
int check_atom(const PureAtom& a, const Env& env) {
    if (a.kind == AtomKind::False) return 0;
    auto l = value_of(a.lhs, env), r = value_of(a.rhs, env);
    if (!l || !r) return -1;
    switch (a.kind) {
        case AtomKind::PtrEq: return *l == *r;
        case AtomKind::PtrNeq: return *l != *r;
        case AtomKind::ArithEq: return l->is_int() && r->is_int() && l->n == r->n;
        case AtomKind::ArithLeq: return l->is_int() && r->is_int() && l->n <= r->n;
        case AtomKind::False: return 0;
    }
    return 0;
}

void collect_literals(const PureFormula& p, std::set<BigInt>& out) {
    for (const auto& a : p)
        for (const Expr* e : {&a.lhs, &a.rhs})
            if (e->is_int()) out.insert(e->value);
}

void collect_literals(const Spatial& k, std::set<BigInt>& out) {
    for (const auto& a : k)
        for (const auto& e : a.args)
            if (e.is_int()) out.insert(e.value);
}

void collect_literals(const Registry& reg, std::set<BigInt>& out) {
    for (const auto& [_, d] : reg.defs) {
        collect_literals(d.arith_side, out);
        collect_literals(Spatial{d.head}, out);
        collect_literals(d.matrix, out);
        collect_literals(Spatial{d.rec}, out);
    }
}

struct EvalState {
    std::vector<SpatialAtom> goals;
    std::vector<PureAtom> pending;
    Env env;
    std::set<int> free;
};

class Evaluator {
public:
    Evaluator(const HeapModel& m, const Registry& reg, std::vector<Value> universe)
        : m_(m), reg_(reg), universe_(std::move(universe)) {}

    bool solve(EvalState s) {
        if (!propagate(s)) return false;
        if (s.goals.empty()) {
            if (!s.free.empty()) return false;
            if (s.pending.empty()) return true;
            return branch_on(s, first_unbound(s.pending));
        }
        int pick = -1;
        for (int pass = 0; pass < 2 && pick < 0; ++pass)
            for (size_t i = 0; i < s.goals.size(); ++i) {
                const auto& g = s.goals[i];
                if ((pass == 0) != g.is_points_to()) continue;
                if (value_of(g.root(), s.env)) {
                    pick = static_cast<int>(i);
                    break;
                }
            }
        if (pick < 0) return branch_on(s, s.goals.front().root().name);

        SpatialAtom g = s.goals[pick];
        s.goals.erase(s.goals.begin() + pick);
        Value rv = *value_of(g.root(), s.env);
        if (g.is_points_to()) return match_cell(std::move(s), g, rv);

        const InductiveDef& d = reg_.def(g.name);
        {
            EvalState b = s;
            b.pending.push_back(PureAtom::eq(g.root(), g.seg()));
            if (d.has_order())
                b.pending.push_back(PureAtom::aeq(g.args[d.index_of(Role::OrderSource)], g.args[d.index_of(Role::OrderTarget)]));
            if (solve(std::move(b))) return true;
        }
        if (!rv.is_loc() || !s.free.count(rv.loc_id())) return false;
        Substitution ex;
        for (const auto& e : d.exists) ex[e] = Expr::var(e + "@" + std::to_string(++counter_));
        SymbolicHeap body = instantiate_rec(d, g, ex);
        s.goals.insert(s.goals.begin(), body.spatial.begin(), body.spatial.end());
        s.pending.insert(s.pending.end(), body.pure.begin(), body.pure.end());
        return solve(std::move(s));
    }

private:
    bool match_cell(EvalState s, const SpatialAtom& g, const Value& rv) {
        if (!rv.is_loc() || !s.free.count(rv.loc_id())) return false;
        const Cell& c = m_.heap.at(rv.loc_id());
        if (c.sort != g.name || c.fields.size() != g.args.size()) return false;
        for (size_t i = 0; i < g.args.size(); ++i) {
            auto v = value_of(g.args[i], s.env);
            if (!v) s.env[g.args[i].name] = c.fields[i];
            else if (*v != c.fields[i]) return false;
        }
        s.free.erase(rv.loc_id());
        return solve(std::move(s));
    }

    static bool propagate(EvalState& s) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < s.pending.size();) {
                const PureAtom& a = s.pending[i];
                int r = check_atom(a, s.env);
                if (r == 0) return false;
                if (r == 1) {
                    s.pending.erase(s.pending.begin() + static_cast<long>(i));
                    changed = true;
                    continue;
                }
                if (a.kind == AtomKind::PtrEq || a.kind == AtomKind::ArithEq) {
                    auto l = value_of(a.lhs, s.env), rr = value_of(a.rhs, s.env);
                    if (l.has_value() != rr.has_value()) {
                        const Value& v = l ? *l : *rr;
                        if (a.kind == AtomKind::ArithEq && !v.is_int()) return false;
                        s.env[(l ? a.rhs : a.lhs).name] = v;
                        s.pending.erase(s.pending.begin() + static_cast<long>(i));
                        changed = true;
                        continue;
                    }
                }
                ++i;
            }
        }
        return true;
    }

    static std::string first_unbound(const std::vector<PureAtom>& pending) {
        for (const auto& a : pending)
            for (const Expr* e : {&a.lhs, &a.rhs})
                if (e->is_var()) return e->name;
        throw std::logic_error("no unbound variable");
    }

    bool branch_on(const EvalState& s, const std::string& var) {
        for (const auto& v : universe_) {
            EvalState t = s;
            t.env[var] = v;
            if (solve(std::move(t))) return true;
        }
        return false;
    }

    const HeapModel& m_;
    const Registry& reg_;
    std::vector<Value> universe_;
    int counter_ = 0;
};

// ---- model enumeration ----

struct Shape {
    Spatial cells;
    PureFormula pure;
};

class ShapeExpander {
public:
    ShapeExpander(const Registry& reg, int max_cells, std::set<std::string> rigid)
        : reg_(reg), max_cells_(max_cells), rigid_(std::move(rigid)) {}

    std::vector<Shape> run(const SymbolicHeap& h, int depth) {
        Spatial cells;
        std::vector<std::pair<SpatialAtom, int>> preds;
        for (const auto& a : h.spatial) {
            if (a.is_points_to()) cells.push_back(a);
            else preds.emplace_back(a, depth);
        }
        go(std::move(cells), std::move(preds), h.pure);
        return std::move(out_);
    }

private:
    bool is_local(const Expr& e) const { return e.is_var() && !rigid_.count(e.name); }

    static void apply(const Substitution& s, Spatial& cells, std::vector<std::pair<SpatialAtom, int>>& preds, PureFormula& pure) {
        cells = substitute(cells, s);
        for (auto& p : preds) p.first = substitute(p.first, s);
        pure = substitute(pure, s);
    }

    // Unifies a=b, eliminating a local variable when possible; `g` is rewritten too.
    void unify(const Expr& a, const Expr& b, bool arith, SpatialAtom& g, Spatial& cells,
               std::vector<std::pair<SpatialAtom, int>>& preds, PureFormula& pure) {
        if (a == b) return;
        Substitution s;
        if (is_local(a)) s[a.name] = b;
        else if (is_local(b)) s[b.name] = a;
        else {
            add_atom(pure, arith ? PureAtom::aeq(a, b) : PureAtom::eq(a, b));
            return;
        }
        apply(s, cells, preds, pure);
        g = substitute(g, s);
    }

    void go(Spatial cells, std::vector<std::pair<SpatialAtom, int>> preds, PureFormula pure) {
        if (static_cast<int>(cells.size()) > max_cells_) return;
        if (preds.empty()) {
            out_.push_back({std::move(cells), std::move(pure)});
            return;
        }
        auto [g, depth] = preds.front();
        preds.erase(preds.begin());
        if (depth <= 0) return;
        const InductiveDef& d = reg_.def(g.name);
        {
            Spatial c = cells;
            auto p = preds;
            PureFormula pi = pure;
            SpatialAtom gg = g;
            unify(Expr(gg.root()), Expr(gg.seg()), false, gg, c, p, pi);
            if (d.has_order())
                unify(Expr(gg.args[d.index_of(Role::OrderSource)]), Expr(gg.args[d.index_of(Role::OrderTarget)]), true, gg, c, p, pi);
            go(std::move(c), std::move(p), std::move(pi));
        }
        if (depth < 2) return;
        Substitution ex;
        for (const auto& e : d.exists) ex[e] = Expr::var(e + "%" + std::to_string(++counter_));
        SymbolicHeap body = instantiate_rec(d, g, ex);
        Spatial c = cells;
        auto p = preds;
        PureFormula pi = pure;
        for (auto& a : body.spatial) {
            if (a.is_points_to()) c.push_back(a);
            else p.emplace_back(a, depth - 1);
        }
        for (const auto& a : body.pure) add_atom(pi, a);
        go(std::move(c), std::move(p), std::move(pi));
    }

    const Registry& reg_;
    int max_cells_;
    std::set<std::string> rigid_;
    int counter_ = 0;
    std::vector<Shape> out_;
};

struct Constraint {
    enum class Kind { Root, Pure } kind;
    size_t cell = 0;
    PureAtom atom;
};

class Assigner {
public:
    Assigner(const Shape& s, std::vector<std::string> stack_vars, const std::map<std::string, bool>& sorts,
             const Bound& b, bool compress, const std::set<BigInt>& literals,
             const std::function<bool(const HeapModel&)>& f)
        : shape_(s), stack_vars_(std::move(stack_vars)), bound_(b), f_(f) {
        std::vector<std::string> order = stack_vars_;
        std::set<std::string> seen(order.begin(), order.end());
        std::set<std::string> vs;
        collect_vars(s.cells, vs);
        collect_vars(s.pure, vs);
        // existentials in order of first appearance
        auto note = [&](const Expr& e) {
            if (e.is_var() && seen.insert(e.name).second) order.push_back(e.name);
        };
        for (const auto& c : s.cells) {
            note(c.root_expr);
            for (const auto& a : c.args) note(a);
        }
        for (const auto& a : s.pure) {
            note(a.lhs);
            note(a.rhs);
        }
        for (const auto& v : order) {
            auto it = sorts.find(v);
            bool ptr = it == sorts.end() ? true : it->second;
            (ptr ? ptr_vars_ : data_vars_).push_back(v);
        }
        if (compress) {
            int n = std::max<int>(1, static_cast<int>(data_vars_.size()));
            for (int i = 0; i < n; ++i) data_domain_.push_back(BigInt(b.data_lo + i));
        } else {
            std::set<BigInt> dom(literals);
            for (int i = b.data_lo; i <= b.data_hi; ++i) dom.insert(BigInt(i));
            data_domain_.assign(dom.begin(), dom.end());
        }
        index_constraints();
    }

    // returns false if the callback asked to stop
    bool run() { return assign_ptr(0, 0); }

private:
    int position(const std::string& v) const {
        for (size_t i = 0; i < ptr_vars_.size(); ++i)
            if (ptr_vars_[i] == v) return static_cast<int>(i);
        for (size_t i = 0; i < data_vars_.size(); ++i)
            if (data_vars_[i] == v) return static_cast<int>(ptr_vars_.size() + i);
        return -1;
    }

    void index_constraints() {
        size_t n = ptr_vars_.size() + data_vars_.size();
        checks_.assign(n + 1, {});
        auto last_pos = [&](std::initializer_list<const Expr*> es) {
            int p = -1;
            for (const Expr* e : es)
                if (e->is_var()) p = std::max(p, position(e->name));
            return static_cast<size_t>(p + 1);  // slot 0: constant-only checks
        };
        for (size_t i = 0; i < shape_.cells.size(); ++i) {
            Constraint c{Constraint::Kind::Root, i, {}};
            checks_[last_pos({&shape_.cells[i].root_expr})].push_back(c);
            for (size_t j = 0; j < i; ++j) {
                Constraint d{Constraint::Kind::Pure, 0,
                             PureAtom::neq(shape_.cells[i].root_expr, shape_.cells[j].root_expr)};
                checks_[last_pos({&shape_.cells[i].root_expr, &shape_.cells[j].root_expr})].push_back(d);
            }
        }
        for (const auto& a : shape_.pure) checks_[last_pos({&a.lhs, &a.rhs})].push_back({Constraint::Kind::Pure, 0, a});
    }

    bool ok_at(size_t slot) const {
        for (const auto& c : checks_[slot]) {
            if (c.kind == Constraint::Kind::Root) {
                auto v = value_of(shape_.cells[c.cell].root_expr, env_);
                if (!v || !v->is_loc()) return false;
            } else if (check_atom(c.atom, env_) != 1) {
                return false;
            }
        }
        return true;
    }

    bool assign_ptr(size_t i, int used) {
        if (i == 0 && !ok_at(0)) return true;
        if (i == ptr_vars_.size()) return assign_data(0);
        const std::string& v = ptr_vars_[i];
        std::vector<Value> choices{Value::null()};
        for (int l = 1; l <= used; ++l) choices.push_back(Value::loc(l));
        if (used < bound_.locs) choices.push_back(Value::loc(used + 1));
        for (const auto& c : choices) {
            env_[v] = c;
            if (!ok_at(i + 1)) continue;
            int nu = (c.is_loc() && c.loc_id() > used) ? used + 1 : used;
            if (!assign_ptr(i + 1, nu)) return false;
        }
        env_.erase(v);
        return true;
    }

    bool assign_data(size_t i) {
        if (i == data_vars_.size()) return emit();
        const std::string& v = data_vars_[i];
        size_t slot = ptr_vars_.size() + i + 1;
        for (const auto& d : data_domain_) {
            env_[v] = Value::num(d);
            if (!ok_at(slot)) continue;
            if (!assign_data(i + 1)) return false;
        }
        env_.erase(v);
        return true;
    }

    bool emit() {
        HeapModel m;
        for (const auto& v : stack_vars_) m.stack[v] = env_.at(v);
        for (const auto& c : shape_.cells) {
            Cell cell{c.name, {}};
            for (const auto& a : c.args) cell.fields.push_back(*value_of(a, env_));
            m.heap[value_of(c.root_expr, env_)->loc_id()] = std::move(cell);
        }
        return f_(m);
    }

    const Shape& shape_;
    std::vector<std::string> stack_vars_;
    const Bound& bound_;
    const std::function<bool(const HeapModel&)>& f_;
    std::vector<std::string> ptr_vars_, data_vars_;
    std::vector<BigInt> data_domain_;
    std::vector<std::vector<Constraint>> checks_;
    Env env_;
};

}  // namespace

bool eval(const HeapModel& m, const SymbolicHeap& h, const Registry& reg) {
    std::set<std::string> fv;
    collect_vars(h, fv);
    for (const auto& v : fv)
        if (!m.stack.count(v)) throw UnboundVariable("unbound variable " + v);

    std::set<Value> uni{Value::null()};
    for (const auto& [_, v] : m.stack) uni.insert(v);
    for (const auto& [l, c] : m.heap) {
        uni.insert(Value::loc(l));
        for (const auto& v : c.fields) uni.insert(v);
    }
    std::set<BigInt> lits;
    collect_literals(h.pure, lits);
    collect_literals(h.spatial, lits);
    collect_literals(reg, lits);
    for (const auto& l : lits) uni.insert(Value::num(l));

    EvalState s;
    s.goals = h.spatial;
    s.pending = h.pure;
    s.env = m.stack;
    for (const auto& [l, _] : m.heap) s.free.insert(l);
    Evaluator ev(m, reg, std::vector<Value>(uni.begin(), uni.end()));
    return ev.solve(std::move(s));
}

void for_each_model(const SymbolicHeap& h, const std::vector<std::string>& stack_vars,
                    const std::map<std::string, bool>& pointer_vars, const Registry& reg, const Bound& b,
                    bool compress_data, const std::function<bool(const HeapModel&)>& f) {
    std::vector<std::string> vars = stack_vars;
    for (const auto& v : free_vars(h))
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    std::set<std::string> rigid(vars.begin(), vars.end());
    std::set<BigInt> lits;
    collect_literals(h.pure, lits);
    collect_literals(h.spatial, lits);
    collect_literals(reg, lits);

    ShapeExpander ex(reg, b.locs, rigid);
    for (const auto& shape : ex.run(h, b.max_unfold)) {
        std::map<std::string, bool> sorts = var_sorts(SymbolicHeap{shape.cells, shape.pure}, reg);
        for (const auto& [v, p] : pointer_vars) sorts[v] = p;
        Assigner as(shape, vars, sorts, b, compress_data, lits, f);
        if (!as.run()) return;
    }
}

bool mentions_int_literals(const Entailment& e, const Registry& reg) {
    std::set<BigInt> lits;
    collect_literals(e.lhs.pure, lits);
    collect_literals(e.lhs.spatial, lits);
    collect_literals(e.rhs.pure, lits);
    collect_literals(e.rhs.spatial, lits);
    collect_literals(reg, lits);
    return !lits.empty();
}

OracleResult oracle_entails(const Entailment& e, const Registry& reg, const Bound& b) {
    OracleResult r;
    std::set<std::string> fv = free_vars(e);
    std::vector<std::string> vars(fv.begin(), fv.end());
    bool compress = !mentions_int_literals(e, reg);
    for_each_model(e.lhs, vars, var_sorts(e, reg), reg, b, compress, [&](const HeapModel& m) {
        ++r.models;
        if (eval(m, e.rhs, reg)) return true;
        r.valid = false;
        r.counter = m;
        return false;
    });
    return r;
}

SymbolicHeap base_of(const Spatial& k, const Registry& reg, FreshNames& fresh) {
    SymbolicHeap out;
    for (const auto& a : k) {
        if (a.is_points_to()) {
            out.spatial.push_back(a);
            continue;
        }
        const InductiveDef& d = reg.def(a.name);
        Substitution s;
        for (size_t i = 0; i < d.params.size(); ++i) s[d.params[i].name] = a.args.at(i);
        for (const auto& e : d.exists) s[e] = Expr::var(fresh.fresh(e));
        // the recursive occurrence collapses: its root becomes the segment end
        // and its order source the target
        s[d.rec.root().name] = a.seg();
        if (d.has_order() && !d.order_next.empty()) s[d.order_next] = a.args[d.index_of(Role::OrderTarget)];
        for (const auto& m : d.matrix)
            if (m.is_pred() && m.name == d.name && m.root().is_var()) s[m.root().name] = substitute(m.seg(), s);
        out.spatial.push_back(substitute(d.head, s));
        Spatial nested;
        for (const auto& m : d.matrix)
            if (!(m.is_pred() && m.name == d.name)) nested.push_back(substitute(m, s));
        SymbolicHeap inner = base_of(nested, reg, fresh);
        out.spatial.insert(out.spatial.end(), inner.spatial.begin(), inner.spatial.end());
        for (const auto& p : inner.pure) add_atom(out.pure, p);
        if (auto o = implied_order(a, reg)) add_atom(out.pure, *o);
        for (const auto& p : d.arith_side) add_atom(out.pure, substitute(p, s));
    }
    return out;
}

HeapModel bad_model(const SymbolicHeap& h, const Registry& reg) {
    for (const auto& a : h.spatial)
        if (a.is_pred()) throw std::invalid_argument("bad_model expects a base formula");
    PureState st(h.pure);
    if (!st.satisfiable()) throw Unsatisfiable("pure part has no model");
    HeapModel m;
    auto sorts = var_sorts(h, reg);
    std::set<std::string> vars;
    collect_vars(h, vars);
    int next = 0;
    // roots first so that cells get the low location numbers
    for (const auto& a : h.spatial)
        if (a.root_expr.is_var() && !m.stack.count(a.root_expr.name)) m.stack[a.root_expr.name] = Value::loc(++next);
    auto arith = st.arith_model();
    for (const auto& v : vars) {
        if (m.stack.count(v)) continue;
        auto it = sorts.find(v);
        bool ptr = it == sorts.end() || it->second;
        if (ptr) m.stack[v] = Value::loc(++next);
        else m.stack[v] = Value::num(arith.count(v) ? arith.at(v) : BigInt(0));
    }
    for (const auto& a : h.spatial) {
        Cell c{a.name, {}};
        for (const auto& f : a.args) c.fields.push_back(*value_of(f, m.stack));
        auto rv = value_of(a.root_expr, m.stack);
        if (!rv || !rv->is_loc()) throw Unsatisfiable("points-to root is not a location");
        m.heap[rv->loc_id()] = std::move(c);
    }
    if (!eval(m, h, reg)) throw Unsatisfiable("bad model does not satisfy its formula");
    return m;
}

HeapModel canonical_locations(const HeapModel& m) {
    std::map<int, int> ren;
    auto see = [&](const Value& v) {
        if (v.is_loc() && !ren.count(v.loc_id())) {
            int n = static_cast<int>(ren.size()) + 1;
            ren[v.loc_id()] = n;
        }
    };
    for (const auto& [_, v] : m.stack) see(v);
    for (const auto& [l, c] : m.heap) {
        see(Value::loc(l));
        for (const auto& v : c.fields) see(v);
    }
    auto map_v = [&](const Value& v) { return v.is_loc() ? Value::loc(ren.at(v.loc_id())) : v; };
    HeapModel out;
    for (const auto& [k, v] : m.stack) out.stack[k] = map_v(v);
    for (const auto& [l, c] : m.heap) {
        Cell nc{c.sort, {}};
        for (const auto& v : c.fields) nc.fields.push_back(map_v(v));
        out.heap[ren.at(l)] = std::move(nc);
    }
    return out;
}

std::string to_string(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Null: return "null";
        case Value::Kind::Loc: return "ℓ" + v.n.str();
        case Value::Kind::Int: return v.n.str();
    }
    return "?";
}

std::string to_string(const HeapModel& model) {
    HeapModel m = canonical_locations(model);
    std::ostringstream os;
    os << "stack:\n";
    for (const auto& [k, v] : m.stack) os << "  " << k << " = " << to_string(v) << "\n";
    os << "heap:\n";
    for (const auto& [l, c] : m.heap) {
        os << "  " << to_string(Value::loc(l)) << " -> " << c.sort << "(";
        for (size_t i = 0; i < c.fields.size(); ++i) os << (i ? ", " : "") << to_string(c.fields[i]);
        os << ")\n";
    }
    return os.str();
}

}  // namespace shlide
