#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace shlide {

using BigInt = boost::multiprecision::cpp_int;

// A term: a variable, the constant null, or an integer literal.
struct Expr {
    enum class Kind { Var, Null, Int };

    Kind kind = Kind::Null;
    std::string name;
    BigInt value;

    static Expr var(std::string n);
    static Expr null();
    static Expr lit(BigInt v);

    bool is_var() const { return kind == Kind::Var; }
    bool is_null() const { return kind == Kind::Null; }
    bool is_int() const { return kind == Kind::Int; }

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
    friend bool operator<(const Expr& a, const Expr& b);
};

std::string to_string(const Expr& e);

enum class AtomKind { PtrEq, PtrNeq, ArithEq, ArithLeq, False };

struct PureAtom {
    AtomKind kind = AtomKind::False;
    Expr lhs;
    Expr rhs;

    static PureAtom eq(Expr a, Expr b);
    static PureAtom neq(Expr a, Expr b);
    static PureAtom aeq(Expr a, Expr b);
    static PureAtom leq(Expr a, Expr b);
    static PureAtom falsum();

    bool is_pointer() const { return kind == AtomKind::PtrEq || kind == AtomKind::PtrNeq; }

    friend bool operator==(const PureAtom& a, const PureAtom& b);
    friend bool operator<(const PureAtom& a, const PureAtom& b);
};

// Symmetric atoms are stored with ordered operands so that syntactic
// membership tests are orientation-free.
PureAtom canonical(PureAtom a);
std::string to_string(const PureAtom& a);

// Conjunction of atoms; the empty vector is `true`.
using PureFormula = std::vector<PureAtom>;

bool contains(const PureFormula& pi, const PureAtom& a);
// Appends `a` unless already present; returns true if it was added.
bool add_atom(PureFormula& pi, const PureAtom& a);
void remove_atom(PureFormula& pi, const PureAtom& a);

struct SpatialAtom {
    enum class Kind { PointsTo, Pred };

    Kind kind = Kind::PointsTo;
    std::string name;        // sort name for points-to, predicate name otherwise
    Expr root_expr;          // points-to root
    std::vector<Expr> args;  // points-to fields, or predicate arguments (root first)
    int unfold = 0;
    int occ = -1;            // occurrence identity used by the trace checker

    static SpatialAtom points_to(Expr root, std::string sort, std::vector<Expr> fields);
    static SpatialAtom pred(std::string name, std::vector<Expr> args, int unfold = 0);

    bool is_pred() const { return kind == Kind::Pred; }
    bool is_points_to() const { return kind == Kind::PointsTo; }
    const Expr& root() const { return is_pred() ? args.at(0) : root_expr; }
    // Segment argument of a predicate occurrence.
    const Expr& seg() const { return args.at(1); }

    // Structural equality ignoring unfolding numbers and occurrence ids.
    bool same_shape(const SpatialAtom& o) const;
};

std::string to_string(const SpatialAtom& a, bool show_unfold = true);

using Spatial = std::vector<SpatialAtom>;

struct SymbolicHeap {
    Spatial spatial;
    PureFormula pure;
};

struct Entailment {
    SymbolicHeap lhs;
    SymbolicHeap rhs;
    Spatial frame;
};

std::string to_string(const Spatial& k, bool show_unfold = true);
std::string to_string(const PureFormula& p);
std::string to_string(const SymbolicHeap& h, bool show_unfold = true);
std::string to_string(const Entailment& e);

using Substitution = std::map<std::string, Expr>;

std::string to_string(const Substitution& s);

Expr substitute(const Expr& e, const Substitution& s);
PureAtom substitute(const PureAtom& a, const Substitution& s);
PureFormula substitute(const PureFormula& p, const Substitution& s);
SpatialAtom substitute(const SpatialAtom& a, const Substitution& s);
Spatial substitute(const Spatial& k, const Substitution& s);
SymbolicHeap substitute(const SymbolicHeap& h, const Substitution& s);
Entailment substitute(const Entailment& e, const Substitution& s);

void collect_vars(const Expr& e, std::set<std::string>& out);
void collect_vars(const PureAtom& a, std::set<std::string>& out);
void collect_vars(const PureFormula& p, std::set<std::string>& out);
void collect_vars(const SpatialAtom& a, std::set<std::string>& out);
void collect_vars(const Spatial& k, std::set<std::string>& out);
void collect_vars(const SymbolicHeap& h, std::set<std::string>& out);

std::set<std::string> free_vars(const SymbolicHeap& h);
std::set<std::string> free_vars(const Entailment& e);

// Multiset equality of spatial parts modulo unfolding numbers.
bool same_spatial(const Spatial& a, const Spatial& b);
// Set equality of pure parts.
bool same_pure(const PureFormula& a, const PureFormula& b);

// Trivially valid atoms (E=E, k<=k with k literal comparisons, ...).
bool trivially_true(const PureAtom& a);

}  // namespace shlide
