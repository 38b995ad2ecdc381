#include "shlide/ast.hpp"

#include <algorithm>
#include <sstream>

namespace shlide {

Expr Expr::var(std::string n) {
    Expr e;
    e.kind = Kind::Var;
    e.name = std::move(n);
    return e;
}

Expr Expr::null() { return Expr{}; }

Expr Expr::lit(BigInt v) {
    Expr e;
    e.kind = Kind::Int;
    e.value = std::move(v);
    return e;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::Var: return a.name == b.name;
        case Expr::Kind::Int: return a.value == b.value;
        case Expr::Kind::Null: return true;
    }
    return false;
}

// Variables first, then literals, null last.
static int kind_rank(Expr::Kind k) {
    switch (k) {
        case Expr::Kind::Var: return 0;
        case Expr::Kind::Int: return 1;
        case Expr::Kind::Null: return 2;
    }
    return 3;
}

bool operator<(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind);
    if (a.kind == Expr::Kind::Var) return a.name < b.name;
    if (a.kind == Expr::Kind::Int) return a.value < b.value;
    return false;
}

std::string to_string(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Var: return e.name;
        case Expr::Kind::Null: return "null";
        case Expr::Kind::Int: return e.value.str();
    }
    return "?";
}

PureAtom PureAtom::eq(Expr a, Expr b) { return canonical({AtomKind::PtrEq, std::move(a), std::move(b)}); }
PureAtom PureAtom::neq(Expr a, Expr b) { return canonical({AtomKind::PtrNeq, std::move(a), std::move(b)}); }
PureAtom PureAtom::aeq(Expr a, Expr b) { return canonical({AtomKind::ArithEq, std::move(a), std::move(b)}); }
PureAtom PureAtom::leq(Expr a, Expr b) { return {AtomKind::ArithLeq, std::move(a), std::move(b)}; }
PureAtom PureAtom::falsum() { return {AtomKind::False, Expr::null(), Expr::null()}; }

PureAtom canonical(PureAtom a) {
    bool symmetric = a.kind == AtomKind::PtrEq || a.kind == AtomKind::PtrNeq || a.kind == AtomKind::ArithEq;
    if (symmetric && a.rhs < a.lhs) std::swap(a.lhs, a.rhs);
    return a;
}

bool operator==(const PureAtom& a, const PureAtom& b) {
    return a.kind == b.kind && a.lhs == b.lhs && a.rhs == b.rhs;
}

bool operator<(const PureAtom& a, const PureAtom& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.lhs != b.lhs) return a.lhs < b.lhs;
    return a.rhs < b.rhs;
}

std::string to_string(const PureAtom& a) {
    switch (a.kind) {
        case AtomKind::PtrEq:
        case AtomKind::ArithEq: return to_string(a.lhs) + "=" + to_string(a.rhs);
        case AtomKind::PtrNeq: return to_string(a.lhs) + "!=" + to_string(a.rhs);
        case AtomKind::ArithLeq: return to_string(a.lhs) + "<=" + to_string(a.rhs);
        case AtomKind::False: return "false";
    }
    return "?";
}

bool contains(const PureFormula& pi, const PureAtom& a) {
    PureAtom c = canonical(a);
    return std::find(pi.begin(), pi.end(), c) != pi.end();
}

bool add_atom(PureFormula& pi, const PureAtom& a) {
    PureAtom c = canonical(a);
    if (std::find(pi.begin(), pi.end(), c) != pi.end()) return false;
    pi.push_back(std::move(c));
    return true;
}

void remove_atom(PureFormula& pi, const PureAtom& a) {
    PureAtom c = canonical(a);
    pi.erase(std::remove(pi.begin(), pi.end(), c), pi.end());
}

SpatialAtom SpatialAtom::points_to(Expr root, std::string sort, std::vector<Expr> fields) {
    SpatialAtom a;
    a.kind = Kind::PointsTo;
    a.root_expr = std::move(root);
    a.name = std::move(sort);
    a.args = std::move(fields);
    return a;
}

SpatialAtom SpatialAtom::pred(std::string name, std::vector<Expr> args, int unfold) {
    SpatialAtom a;
    a.kind = Kind::Pred;
    a.name = std::move(name);
    a.args = std::move(args);
    a.unfold = unfold;
    return a;
}

bool SpatialAtom::same_shape(const SpatialAtom& o) const {
    if (kind != o.kind || name != o.name || args != o.args) return false;
    return is_pred() || root_expr == o.root_expr;
}

static std::string join_exprs(const std::vector<Expr>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += to_string(v[i]);
    }
    return s;
}

std::string to_string(const SpatialAtom& a, bool show_unfold) {
    if (a.is_points_to()) return to_string(a.root_expr) + "->" + a.name + "(" + join_exprs(a.args) + ")";
    std::string s = a.name + "(" + join_exprs(a.args) + ")";
    if (show_unfold) s += "^" + std::to_string(a.unfold);
    return s;
}

std::string to_string(const Spatial& k, bool show_unfold) {
    if (k.empty()) return "emp";
    std::string s;
    for (size_t i = 0; i < k.size(); ++i) {
        if (i) s += " * ";
        s += to_string(k[i], show_unfold);
    }
    return s;
}

std::string to_string(const PureFormula& p) {
    if (p.empty()) return "true";
    std::string s;
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) s += " /\\ ";
        s += to_string(p[i]);
    }
    return s;
}

std::string to_string(const SymbolicHeap& h, bool show_unfold) {
    std::string s = to_string(h.spatial, show_unfold);
    if (!h.pure.empty()) s += " /\\ " + to_string(h.pure);
    return s;
}

std::string to_string(const Entailment& e) {
    return to_string(e.lhs, true) + " |- " + to_string(e.rhs, false);
}

std::string to_string(const Substitution& s) {
    std::string out = "[";
    bool first = true;
    for (const auto& [v, e] : s) {
        if (!first) out += ", ";
        first = false;
        out += to_string(e) + "/" + v;
    }
    return out + "]";
}

Expr substitute(const Expr& e, const Substitution& s) {
    if (!e.is_var()) return e;
    auto it = s.find(e.name);
    return it == s.end() ? e : it->second;
}

PureAtom substitute(const PureAtom& a, const Substitution& s) {
    PureAtom r = a;
    r.lhs = substitute(a.lhs, s);
    r.rhs = substitute(a.rhs, s);
    return canonical(r);
}

PureFormula substitute(const PureFormula& p, const Substitution& s) {
    PureFormula out;
    for (const auto& a : p) add_atom(out, substitute(a, s));
    return out;
}

SpatialAtom substitute(const SpatialAtom& a, const Substitution& s) {
    SpatialAtom r = a;
    r.root_expr = substitute(a.root_expr, s);
    for (auto& x : r.args) x = substitute(x, s);
    return r;
}

Spatial substitute(const Spatial& k, const Substitution& s) {
    Spatial out;
    out.reserve(k.size());
    for (const auto& a : k) out.push_back(substitute(a, s));
    return out;
}

SymbolicHeap substitute(const SymbolicHeap& h, const Substitution& s) {
    return {substitute(h.spatial, s), substitute(h.pure, s)};
}

Entailment substitute(const Entailment& e, const Substitution& s) {
    return {substitute(e.lhs, s), substitute(e.rhs, s), substitute(e.frame, s)};
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
    if (e.is_var()) out.insert(e.name);
}

void collect_vars(const PureAtom& a, std::set<std::string>& out) {
    collect_vars(a.lhs, out);
    collect_vars(a.rhs, out);
}

void collect_vars(const PureFormula& p, std::set<std::string>& out) {
    for (const auto& a : p) collect_vars(a, out);
}

void collect_vars(const SpatialAtom& a, std::set<std::string>& out) {
    if (a.is_points_to()) collect_vars(a.root_expr, out);
    for (const auto& x : a.args) collect_vars(x, out);
}

void collect_vars(const Spatial& k, std::set<std::string>& out) {
    for (const auto& a : k) collect_vars(a, out);
}

void collect_vars(const SymbolicHeap& h, std::set<std::string>& out) {
    collect_vars(h.spatial, out);
    collect_vars(h.pure, out);
}

std::set<std::string> free_vars(const SymbolicHeap& h) {
    std::set<std::string> out;
    collect_vars(h, out);
    return out;
}

std::set<std::string> free_vars(const Entailment& e) {
    std::set<std::string> out;
    collect_vars(e.lhs, out);
    collect_vars(e.rhs, out);
    collect_vars(e.frame, out);
    return out;
}

bool same_spatial(const Spatial& a, const Spatial& b) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        bool found = false;
        for (size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && x.same_shape(b[j])) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

bool same_pure(const PureFormula& a, const PureFormula& b) {
    std::set<PureAtom> sa, sb;
    for (const auto& x : a) sa.insert(canonical(x));
    for (const auto& x : b) sb.insert(canonical(x));
    return sa == sb;
}

bool trivially_true(const PureAtom& a) {
    switch (a.kind) {
        case AtomKind::PtrEq:
        case AtomKind::ArithEq:
        case AtomKind::ArithLeq:
            if (a.lhs == a.rhs) return true;
            if (a.kind == AtomKind::ArithLeq && a.lhs.is_int() && a.rhs.is_int()) return a.lhs.value <= a.rhs.value;
            return false;
        default: return false;
    }
}

}  // namespace shlide
