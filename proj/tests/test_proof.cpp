#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

#include <chrono>
#include <filesystem>

using namespace shlide;
using testdata::problem;

namespace {

ProblemFile golden() { return parse_native(testdata::read_file(testdata::data_path("suite/lls_llb_golden.ent"))); }

std::set<std::string> vars_of(const Entailment& e) { return free_vars(e); }

ProofTree single_node(const Entailment& e) {
    ProofTree t;
    ProofNode n;
    n.ent = e;
    t.nodes.push_back(n);
    return t;
}

}  // namespace

TEST_CASE("golden proof") {
    auto p = golden();
    auto t0 = std::chrono::steady_clock::now();
    Verdict v = prove(p.query, p.reg);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(v.valid);
    CHECK(ms < 100.0);
    CHECK(v.tree.nodes.size() == 13);
    REQUIRE(v.tree.backlinks.size() == 1);
    const Backlink& bl = v.tree.backlinks[0];
    CHECK(bl.companion == 0);
    CHECK(bl.bud == 12);
    // sigma maps the fresh successor root to x and the fresh order source to mi
    REQUIRE(bl.sigma.size() == 2);
    std::map<std::string, std::string> targets;
    for (const auto& [from, to] : bl.sigma) targets[to.name] = from;
    CHECK(targets.count("x"));
    CHECK(targets.count("mi"));
    for (const auto& [from, _] : bl.sigma) CHECK(from.find('#') != std::string::npos);
    CHECK(v.tree.node(0).rule == "LInd");
    CHECK(check_cyclic_soundness(v.tree).ok);
    CHECK(v.max_unfold <= 2);
}

TEST_CASE("trivial Emp") {
    auto p = problem(testdata::LL, "emp /\\ x=x |- emp");
    Verdict v = prove(p.query, p.reg);
    CHECK(v.valid);
    CHECK(v.tree.nodes.size() == 1);
    CHECK(v.tree.node(0).status == NodeStatus::Valid);
    CHECK(v.tree.node(0).axiom == "=L+Id");
}

TEST_CASE("list cells are not tree cells") {
    auto p = problem(testdata::TREE, "ll(x, null) /\\ x!=null |- tree(x, null)");
    Verdict v = prove(p.query, p.reg);
    CHECK_FALSE(v.valid);
    REQUIRE(v.witness.has_value());
    CHECK(eval(*v.witness, p.query.lhs, p.reg));
    CHECK_FALSE(eval(*v.witness, p.query.rhs, p.reg));
    OracleResult o = oracle_entails(p.query, p.reg, Bound{2, 4, -3, 6});
    CHECK_FALSE(o.valid);
}

TEST_CASE("is_closed classifications") {
    auto all = problem(testdata::LL, "emp |- emp");
    Verdict vt = prove(all.query, all.reg);
    CHECK(is_closed(vt.tree, all.reg).kind == ClosedResult::Kind::Valid);

    auto mm = problem("data c1 { c1 next; }\ndata c2 { c2 next; }\n",
                      "x->c1(y) /\\ x!=null |- x->c2(y)");
    ClosedResult r = is_closed(single_node(mm.query), mm.reg);
    CHECK(r.kind == ClosedResult::Kind::Invalid);
    CHECK(r.info == "2d");

    auto e5 = problem(testdata::LLS_LLB, "x->c4(null, ma) /\\ x!=null /\\ mi<=ma |- llb(x, null, mi)");
    ClosedResult r5 = is_closed(single_node(e5.query), e5.reg);
    CHECK(r5.kind == ClosedResult::Kind::Unknown);
    CHECK(r5.info == "RInd");
}

TEST_CASE("apply_rule follows the schemas") {
    auto e5 = problem(testdata::LLS_LLB, "x->c4(null, ma) /\\ x!=null /\\ mi<=ma |- llb(x, null, mi)");
    Planner pl{e5.reg, vars_of(e5.query), {}, 1};
    auto prem = apply_rule(e5.query, "RInd", pl);
    REQUIRE(prem.size() == 1);
    CHECK(to_string(prem[0].rhs) == "x->c4(null,ma) * llb(null,null,mi)^0 /\\ mi<=ma");
    CHECK_THROWS_AS(apply_rule(e5.query, "LInd", pl), SideConditionFailed);

    auto e10 = problem(testdata::LLS_LLB,
                       "x->c4(X, m1) * lls(X, null, m1, ma) /\\ x!=null /\\ mi<=m1 /\\ X!=x /\\ X!=null "
                       "|- x->c4(X, m1) * llb(X, null, mi)");
    Planner p10{e10.reg, {"x", "mi", "ma"}, {}, 1};
    auto star = apply_rule(e10.query, "Star", p10);
    REQUIRE(star.size() == 2);
    CHECK(to_string(star[0].lhs.spatial) == "x->c4(X,m1)");
    CHECK(to_string(star[0].rhs.spatial) == "x->c4(X,m1)");
    CHECK(to_string(star[1].rhs.spatial) == "llb(X,null,mi)^0");

    auto inc = problem(testdata::LL, "ll(x, y) /\\ x=y /\\ x!=y |- emp");
    Planner pi{inc.reg, vars_of(inc.query), {}, 1};
    CHECK(apply_rule(inc.query, "Inconsistency", pi).empty());
}

TEST_CASE("link_back") {
    auto p = golden();
    Verdict v = prove(p.query, p.reg);
    REQUIRE(v.tree.nodes.size() == 13);
    // replay the search up to the bud and ask again
    ProofTree t = v.tree;
    t.nodes[12].status = NodeStatus::Open;
    t.backlinks.clear();
    auto lb = link_back(t, 12);
    REQUIRE(lb.has_value());
    CHECK(lb->first == 0);
    CHECK(to_string(lb->second) == to_string(v.tree.backlinks[0].sigma));

    // no predicate was unfolded: no progress
    auto q = problem(testdata::LL, "ll(x, y) |- ll(x, y)");
    ProofTree flat = single_node(q.query);
    ProofNode child;
    child.id = 1;
    child.parent = 0;
    child.ent = q.query;
    flat.nodes[0].children.push_back(1);
    flat.nodes.push_back(child);
    CHECK_FALSE(link_back(flat, 1).has_value());

    // the bud re-rooted: both sides carry unfolding number 1
    ProofTree rer;
    ProofNode c = t.nodes[12];
    c.id = 0;
    c.parent = -1;
    c.children = {1};
    c.status = NodeStatus::Open;
    ProofNode b = t.nodes[12];
    b.id = 1;
    b.parent = 0;
    b.children.clear();
    b.status = NodeStatus::Open;
    rer.nodes = {c, b};
    rer.occ_parent = t.occ_parent;
    CHECK_FALSE(link_back(rer, 1).has_value());
}

TEST_CASE("soundness checker") {
    auto p = golden();
    Verdict v = prove(p.query, p.reg);
    CHECK(check_cyclic_soundness(v.tree).ok);

    // no LInd on the cycle
    ProofTree bad = v.tree;
    for (auto& n : bad.nodes)
        if (n.rule == "LInd") n.rule = "Subst";
    SoundnessReport r = check_cyclic_soundness(bad);
    CHECK_FALSE(r.ok);
    CHECK(r.bud == 12);

    // two cycles, one per list
    auto two = problem(testdata::LL, "ll(x, y) * ll(y, null) * ll(a, b) * ll(b, null) |- ll(x, null) * ll(a, null)");
    Verdict v2 = prove(two.query, two.reg);
    REQUIRE(v2.valid);
    CHECK(v2.tree.backlinks.size() >= 2);
    CHECK(check_cyclic_soundness(v2.tree).ok);
    CHECK(oracle_entails(two.query, two.reg, Bound{3, 6, -3, 6}).valid);
}

TEST_CASE("proof search is deterministic") {
    auto p = golden();
    std::string a = export_proof(prove(p.query, p.reg).tree, "text");
    std::string b = export_proof(prove(p.query, p.reg).tree, "text");
    CHECK(a == b);
}

TEST_CASE("unfolding numbers stay within 2 on the suite") {
    namespace fs = std::filesystem;
    int n = 0;
    for (const auto& de : fs::directory_iterator(testdata::data_path("suite"))) {
        auto pf = parse_native(testdata::read_file(de.path().string()));
        Verdict v = prove(pf.query, pf.reg);
        CHECK_MESSAGE(v.max_unfold <= 2, de.path().filename().string());
        for (const auto& node : v.tree.nodes)
            for (const auto& a : node.ent.lhs.spatial) CHECK(a.unfold <= 2);
        ++n;
    }
    CHECK(n >= 30);
}

TEST_CASE("rule instances are locally sound on the suite") {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(testdata::data_path("suite"))) files.push_back(de.path());
    std::sort(files.begin(), files.end());
    Bound b{3, 5, -2, 3};
    long instances = 0;
    for (const auto& f : files) {
        auto pf = parse_native(testdata::read_file(f.string()));
        Verdict v = prove(pf.query, pf.reg);
        for (const auto& node : v.tree.nodes) {
            if (node.children.empty()) continue;
            bool premises_ok = true;
            for (int c : node.children) {
                Entailment pe = v.tree.node(c).ent;
                if (!oracle_entails(pe, pf.reg, b).valid) premises_ok = false;
            }
            if (!premises_ok) continue;
            ++instances;
            std::string where = f.filename().string() + " #" + std::to_string(node.id) + " " + node.rule;
            CHECK_MESSAGE(oracle_entails(node.ent, pf.reg, b).valid, where);
        }
    }
    CHECK(instances > 50);
}
