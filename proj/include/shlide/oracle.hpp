#pragma once

#include "shlide/registry.hpp"

#include <functional>

namespace shlide {

struct UnboundVariable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Unsatisfiable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Locations and integers are disjoint; null is neither.
struct Value {
    enum class Kind { Null, Loc, Int };

    Kind kind = Kind::Null;
    BigInt n;  // location number (>= 1) or integer value

    static Value null() { return {}; }
    static Value loc(int l) { return {Kind::Loc, BigInt(l)}; }
    static Value num(BigInt v) { return {Kind::Int, std::move(v)}; }

    bool is_loc() const { return kind == Kind::Loc; }
    bool is_int() const { return kind == Kind::Int; }
    int loc_id() const { return static_cast<int>(n); }

    friend bool operator==(const Value& a, const Value& b) { return a.kind == b.kind && a.n == b.n; }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
    friend bool operator<(const Value& a, const Value& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.n < b.n;
    }
};

struct Cell {
    std::string sort;
    std::vector<Value> fields;
};

struct HeapModel {
    std::map<std::string, Value> stack;
    std::map<int, Cell> heap;
};

struct Bound {
    int max_unfold = 4;  // depth of predicate expansion when generating models
    int locs = 6;
    int data_lo = -3;
    int data_hi = 6;
};

// Exact satisfaction check (predicate occurrences are matched against the
// finite heap, so no depth cut-off is needed).
bool eval(const HeapModel& m, const SymbolicHeap& h, const Registry& reg);

// Calls `f` on every canonical model of `h` whose stack covers `stack_vars`
// (plus the free variables of h); stops early when `f` returns false.
// With `compress_data`, integer variables range over order types only.
void for_each_model(const SymbolicHeap& h, const std::vector<std::string>& stack_vars,
                    const std::map<std::string, bool>& pointer_vars, const Registry& reg, const Bound& b,
                    bool compress_data, const std::function<bool(const HeapModel&)>& f);

struct OracleResult {
    bool valid = true;  // bounded: no counter-model within the bound
    std::optional<HeapModel> counter;
    long models = 0;
};

OracleResult oracle_entails(const Entailment& e, const Registry& reg, const Bound& b = {});

// Whether integer literals occur anywhere in `e` or the definitions it uses.
bool mentions_int_literals(const Entailment& e, const Registry& reg);

// One-step materialization of every predicate occurrence.
SymbolicHeap base_of(const Spatial& k, const Registry& reg, FreshNames& fresh);

// Distinct non-null locations for pointer variables, a solver model for
// arithmetic ones. `h` must have a base spatial part.
HeapModel bad_model(const SymbolicHeap& h, const Registry& reg);

// Locations are renamed l1, l2, ... in order of first use.
std::string to_string(const Value& v);
std::string to_string(const HeapModel& m);
HeapModel canonical_locations(const HeapModel& m);

}  // namespace shlide
