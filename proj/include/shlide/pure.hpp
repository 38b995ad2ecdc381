#pragma once

#include "shlide/ast.hpp"

namespace shlide {

enum class PairStatus { Equal, Distinct, Unknown };

// Decision state for a conjunction of pure atoms: union-find with
// disequality edges for pointers, and a closed difference-bound matrix
// for arithmetic terms (integer literals are offsets from a zero node).
class PureState {
public:
    explicit PureState(const PureFormula& pi);

    bool satisfiable() const { return sat_; }
    bool entails(const PureAtom& a) const;
    bool entails(const PureFormula& p) const;
    PairStatus status(const Expr& a, const Expr& b) const;

    // An integer assignment for every arithmetic variable mentioned
    // (requires satisfiable()).
    std::map<std::string, BigInt> arith_model() const;

private:
    int ptr_id(const Expr& e) const;
    int find(int x) const;
    int arith_id(const Expr& e) const;
    // strongest known bound on x_to - x_from, if any
    std::optional<BigInt> bound(int from, int to) const;
    bool entails_diff(const Expr& u, const Expr& v, const BigInt& w) const;  // u - v <= w

    bool sat_ = true;
    std::map<Expr, int> ptr_index_;
    mutable std::vector<int> parent_;
    std::vector<std::pair<int, int>> neq_;
    std::map<std::string, int> arith_index_;  // node 0 is the zero node
    std::vector<std::vector<std::optional<BigInt>>> dist_;
};

bool satisfiable(const PureFormula& pi);
bool entails(const PureFormula& pi, const PureFormula& goal);
PairStatus status_of_pair(const PureFormula& pi, const Expr& a, const Expr& b);

}  // namespace shlide
