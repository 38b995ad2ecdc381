#pragma once

#include "shlide/registry.hpp"

namespace shlide {

// Guard of a spatial atom: none for points-to, E!=F for P(E,F,..).
std::optional<PureAtom> guard(const SpatialAtom& a);

struct NfReport {
    bool ok = true;
    std::vector<int> failed;  // clause numbers 1..6
};

NfReport is_nf(const SymbolicHeap& h);

// One application of a rule: its premises, and for each premise the
// variables the step eliminated (var -> replacement).
struct RuleResult {
    std::string rule;
    std::vector<Entailment> premises;
    std::vector<Substitution> elims;
};

std::optional<RuleResult> rule_eq_l(const Entailment& e);
// `params` are the variables of the input entailment; Subst keeps them when it can.
std::optional<RuleResult> rule_subst(const Entailment& e, const std::set<std::string>& params);
std::optional<RuleResult> rule_lbase(const Entailment& e, const Registry& reg);
std::optional<RuleResult> rule_neq_null(const Entailment& e);
std::optional<RuleResult> rule_neq_star(const Entailment& e);
// Case split on the first (root, segment) pair of an LHS occurrence whose
// relation is undecided.
std::optional<RuleResult> rule_exm(const Entailment& e);
// Case split on a pair given explicitly (used for RHS-guided splits).
RuleResult exm_on(const Entailment& e, const Expr& a, const Expr& b);

// Composes `step` into an accumulated elimination map.
Substitution compose_elim(const Substitution& acc, const Substitution& step);

struct NormBranch {
    Entailment ent;
    std::vector<std::string> trace;
    Substitution elim;
    bool inconsistent = false;
};

std::vector<NormBranch> normalize(const Entailment& e, const Registry& reg, const std::set<std::string>& params = {});

}  // namespace shlide
