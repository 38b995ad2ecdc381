#pragma once

#include "shlide/ast.hpp"

#include <stdexcept>

namespace shlide {

struct UnknownPredicate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FieldDecl {
    std::string name;
    std::string type;  // a node sort name, or "int"
    bool is_pointer() const { return type != "int"; }
};

struct SortDecl {
    std::string name;
    std::vector<FieldDecl> fields;
};

enum class Role { Root, Segment, Border, Transitivity, OrderSource, OrderTarget };

std::string to_string(Role r);

enum class OrderOp { Eq, Le, Ge };

struct Param {
    std::string name;
    Role role;
};

// pred P(r,F,B..,u,sc,tg) := emp /\ r=F /\ sc=tg
//                          \/ exists w. r->c(p) * matrix * P(X,F,B..,u,sc',tg) /\ r!=F /\ sc op sc' /\ side
struct InductiveDef {
    std::string name;
    std::vector<Param> params;
    std::vector<std::string> exists;
    SpatialAtom head;
    Spatial matrix;  // nested occurrences (any stray points-to lands here and fails C2)
    SpatialAtom rec;
    std::optional<OrderOp> order_op;
    std::string order_next;  // the existential sc'
    PureFormula arith_side;

    // Filled in by Registry::finalize.
    std::vector<bool> param_pointer;

    int index_of(Role r) const;
    const std::string& root_param() const { return params.at(index_of(Role::Root)).name; }
    const std::string& seg_param() const { return params.at(index_of(Role::Segment)).name; }
    bool has_order() const { return index_of(Role::OrderSource) >= 0 && index_of(Role::OrderTarget) >= 0; }
};

struct Registry {
    std::map<std::string, SortDecl> sorts;
    std::map<std::string, InductiveDef> defs;
    std::vector<std::string> def_order;

    const InductiveDef& def(const std::string& name) const;
    const SortDecl& sort(const std::string& name) const;
    bool has_def(const std::string& name) const { return defs.count(name) > 0; }

    void add_sort(SortDecl s);
    void add_def(InductiveDef d);
    // Infers parameter sorts (pointer vs. data) across all definitions.
    void finalize();
};

struct WellformedReport {
    bool ok = true;
    std::string condition;  // "C1", "C2", "C3" or "Shape"
    std::string witness;
    std::string message;
};

WellformedReport check_wellformed(const InductiveDef& def, const Registry& reg);

// Session-local generator of names of the form base#n.
class FreshNames {
public:
    std::string fresh(const std::string& base);
    int counter() const { return counter_; }

private:
    int counter_ = 0;
};

struct Unfolding {
    SymbolicHeap base;
    SymbolicHeap rec;
};

// Instantiates both branches; existentials of the recursive branch get fresh names.
Unfolding unfold(const SpatialAtom& occ, const Registry& reg, FreshNames& fresh);

// Recursive branch with the existentials bound by `ex` (unbound ones are left as-is).
SymbolicHeap instantiate_rec(const InductiveDef& def, const SpatialAtom& occ, const Substitution& ex);

// Consequence sc op* tg that every model of a predicate occurrence satisfies.
std::optional<PureAtom> implied_order(const SpatialAtom& occ, const Registry& reg);

std::set<Expr> roots(const Spatial& k);

// Maps every variable of `e` to true (pointer) or false (data).
std::map<std::string, bool> var_sorts(const Entailment& e, const Registry& reg);
std::map<std::string, bool> var_sorts(const SymbolicHeap& h, const Registry& reg);

}  // namespace shlide
