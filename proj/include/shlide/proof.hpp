#pragma once

#include "shlide/normalize.hpp"
#include "shlide/oracle.hpp"

namespace shlide {

struct UnsupportedFragment : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SideConditionFailed : std::logic_error {
    using std::logic_error::logic_error;
};

enum class NodeStatus { Open, Valid, Invalid, Bud };

struct ProofNode {
    int id = 0;
    Entailment ent;
    NodeStatus status = NodeStatus::Open;
    int parent = -1;
    std::vector<int> children;
    // label of the edge(s) to the children, or of the closing axiom
    std::string rule;
    std::string axiom;
    std::string invalid_case;  // "2a".."2d"
    int unfolded_occ = -1;     // occurrence unfolded by LInd/Frame on the outgoing edge
    Substitution elim;         // variables eliminated on the incoming edge
    int companion = -1;
    Substitution sigma;
};

struct Backlink {
    int companion;
    int bud;
    Substitution sigma;
};

struct ProofTree {
    std::vector<ProofNode> nodes;
    std::vector<Backlink> backlinks;
    std::map<int, int> occ_parent;  // unfolding lineage of LHS predicate occurrences
    int root = 0;

    const ProofNode& node(int id) const { return nodes.at(static_cast<size_t>(id)); }
    ProofNode& node(int id) { return nodes.at(static_cast<size_t>(id)); }
    bool is_ancestor(int a, int b) const;  // strict
    // true when occurrence `a` equals `b` or `b` was obtained by unfolding from `a`
    bool occ_descends(int b, int a) const;
};

struct ProveOptions {
    long node_budget = 100000;
    bool counter_model = true;
    // false: drop entailments of finished subtrees except buds and companions
    bool retain_closed = true;
    Bound oracle_bound;
};

struct Verdict {
    bool valid = false;
    ProofTree tree;
    int stuck = -1;
    std::string invalid_case;
    std::optional<HeapModel> witness;
    int max_unfold = 0;  // largest LHS unfolding number seen during the search
};

Verdict prove(const Entailment& e, const Registry& reg, const ProveOptions& opt = {});

// What the search would do next at a leaf.
struct Step {
    enum class Kind { Axiom, Rule, Stuck } kind = Kind::Stuck;
    std::string label;  // silent rules joined with '+', then the main rule
    std::string main;
    std::vector<Entailment> premises;
    std::vector<Substitution> elims;
    int unfolded_occ = -1;
    std::vector<std::pair<int, int>> new_occs;  // (child occurrence, parent occurrence)
    std::string invalid_case;
};

struct Planner {
    const Registry& reg;
    std::set<std::string> params;
    FreshNames fresh;
    int next_occ = 1;

    Step plan(const Entailment& e);
};

// Applies `rule` to a leaf and returns its premises (empty for an axiom).
// Rule choice is deterministic, so this throws SideConditionFailed when the
// planner would not fire `rule` here, naming the rule that does apply.
std::vector<Entailment> apply_rule(const Entailment& leaf, const std::string& rule, Planner& pl);

struct ClosedResult {
    enum class Kind { Valid, Invalid, Unknown } kind = Kind::Unknown;
    int node = -1;
    std::string info;  // case tag or rule label
};

ClosedResult is_closed(const ProofTree& t, const Registry& reg);

std::optional<std::pair<int, Substitution>> link_back(const ProofTree& t, int leaf);

struct SoundnessReport {
    bool ok = true;
    int companion = -1;
    int bud = -1;
    std::string message;
};

SoundnessReport check_cyclic_soundness(const ProofTree& t);

}  // namespace shlide
