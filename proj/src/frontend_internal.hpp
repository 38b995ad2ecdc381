#pragma once

#include "shlide/frontend.hpp"

namespace shlide::detail {

struct RawAtom {
    enum class Op { Eq, Neq, Le, Ge, False };
    Op op = Op::Eq;
    Expr lhs;
    Expr rhs;
    int line = 0;
    int col = 0;
};

struct RawHeap {
    Spatial spatial;
    std::vector<RawAtom> pure;
};

struct RawDef {
    std::string name;
    std::vector<Param> params;
    RawHeap base;
    std::vector<std::string> exists;
    RawHeap rec;
    std::map<std::string, bool> declared;  // variable -> pointer, when the input declares sorts
    int line = 0;
    int col = 0;
};

// Tracks whether each variable is a pointer or an integer and rejects mixed use.
class SortEnv {
public:
    SortEnv(int line, int col) : line_(line), col_(col) {}
    void note(const Expr& e, bool ptr);
    std::optional<bool> get(const Expr& e) const;

private:
    std::map<std::string, bool> m_;
    int line_, col_;
};

InductiveDef build_def(const RawDef& d, const Registry& reg);
Entailment build_query(const RawHeap& lhs, const RawHeap& rhs, const Registry& reg,
                       const std::map<std::string, bool>& declared, int line, int col);
// Finalizes parameter sorts and checks every definition.
void finish_registry(Registry& reg);

}  // namespace shlide::detail
