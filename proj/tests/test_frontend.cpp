#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

#include <iostream>
#include <sstream>

using namespace shlide;
using testdata::problem;

namespace {

size_t count(const std::string& s, const std::string& needle) {
    size_t n = 0;
    for (size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + needle.size())) ++n;
    return n;
}

struct CliRun {
    int code = 0;
    std::string out;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "shlide_cli");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream buf;
    auto* old = std::cout.rdbuf(buf.rdbuf());
    CliRun r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old);
    r.out = buf.str();
    return r;
}

}  // namespace

TEST_CASE("native definitions and roles") {
    auto p = problem(testdata::LL, "emp |- emp");
    REQUIRE(p.reg.def_order.size() == 1);
    const InductiveDef& d = p.reg.def("ll");
    REQUIRE(d.params.size() == 2);
    CHECK(d.params[0].role == Role::Root);
    CHECK(d.params[1].role == Role::Segment);
    CHECK(p.query.lhs.spatial.empty());
    CHECK(p.query.rhs.spatial.empty());
}

TEST_CASE("golden file") {
    auto p = parse_native(testdata::read_file(testdata::data_path("suite/lls_llb_golden.ent")));
    CHECK(p.reg.def_order.size() == 2);
    CHECK(p.reg.def("lls").params[2].role == Role::OrderSource);
    CHECK(p.reg.def("lls").params[3].role == Role::OrderTarget);
    CHECK(p.reg.def("llb").params[2].role == Role::Transitivity);
    REQUIRE(p.expect_valid.has_value());
    CHECK(*p.expect_valid);
}

TEST_CASE("printing then parsing is the identity") {
    for (const char* f : {"suite/lls_llb_golden.ent", "suite/nll_cons.ent", "suite/tree_cons.ent", "suite/skl3_concat.ent"}) {
        auto p = parse_native(testdata::read_file(testdata::data_path(f)));
        std::string once = print_native(p);
        auto q = parse_native(once);
        CHECK_MESSAGE(print_native(q) == once, f);
        CHECK(to_string(q.query) == to_string(p.query));
    }
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_native(testdata::read_file(testdata::data_path("bad/malformed.ent")));
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.col > 1);
    }
}

TEST_CASE("ill-formed definitions are rejected") {
    CHECK_THROWS_AS(problem("data c1 { c1 next; }\n"
                            "pred bad(root r, seg F) := emp /\\ r=F \\/ exists X. r->c1(X) * bad(r, F) /\\ r!=F;\n",
                            "emp |- emp"),
                    WellformednessError);
}

TEST_CASE("SL-COMP input") {
    auto p = parse_slcomp(testdata::read_file(testdata::data_path("slcomp/ls_concat.smt2")));
    REQUIRE(p.reg.def_order.size() == 1);
    const InductiveDef& d = p.reg.def("ls");
    CHECK(d.params[0].role == Role::Root);
    CHECK(d.params[1].role == Role::Segment);
    CHECK(d.matrix.empty());
    REQUIRE(p.expect_valid.has_value());
    CHECK(*p.expect_valid);
    CHECK(p.query.lhs.spatial.size() == 2);
    CHECK(prove(p.query, p.reg).valid);

    auto n = parse_slcomp(testdata::read_file(testdata::data_path("slcomp/nll_cons.smt2")));
    CHECK(n.reg.def_order.size() == 2);
    CHECK(prove(n.query, n.reg).valid == *n.expect_valid);

    auto s = parse_slcomp(testdata::read_file(testdata::data_path("slcomp/ls_dangling.smt2")));
    CHECK_FALSE(*s.expect_valid);
    CHECK_FALSE(prove(s.query, s.reg).valid);

    CHECK_THROWS_AS(parse_slcomp(testdata::read_file(testdata::data_path("bad/wand.smt2"))), UnsupportedConstruct);
    CHECK_THROWS_AS(parse_slcomp(testdata::read_file(testdata::data_path("bad/no_roles.smt2"))), RoleAnnotationMissing);
}

TEST_CASE("proof export") {
    auto p = parse_native(testdata::read_file(testdata::data_path("suite/lls_llb_golden.ent")));
    Verdict v = prove(p.query, p.reg);
    REQUIRE(v.valid);
    std::string text = export_proof(v.tree, "text");
    CHECK(count(text, "\n") == 13);
    CHECK(count(text, "~~> companion#0 via [") == 1);
    CHECK(text.rfind("#0 ", 0) == 0);

    std::string dot = export_proof(v.tree, "dot");
    CHECK(dot.rfind("digraph proof {", 0) == 0);
    CHECK(count(dot, "[label=\"#") == 13);
    CHECK(count(dot, "style=dashed") == 1);
    CHECK(count(dot, " -> n") == 13);
    CHECK(dot.find("[OPEN]") == std::string::npos);

    auto e = problem(testdata::LL, "emp |- emp");
    std::string one = export_proof(prove(e.query, e.reg).tree, "dot");
    CHECK(count(one, " -> n") == 0);
    CHECK(count(one, "[label=\"#") == 1);

    CHECK_THROWS_AS(export_proof(v.tree, "svg"), std::invalid_argument);
}

TEST_CASE("command line") {
    CliRun g = cli({"--input", testdata::data_path("suite/lls_llb_golden.ent"), "--oracle-check"});
    CHECK(g.code == 0);
    CHECK(g.out.rfind("VALID\nORACLE-AGREES\n", 0) == 0);
    CHECK(g.out.find("proof: 13 nodes, 1 backlinks") != std::string::npos);

    CliRun bad = cli({"--input", testdata::data_path("bad/malformed.ent")});
    CHECK(bad.code == 2);

    CliRun inv = cli({"--input", testdata::data_path("suite/ll_split.ent"), "--expect", "invalid"});
    CHECK(inv.code == 0);
    CHECK(inv.out.rfind("INVALID\n", 0) == 0);
    CHECK(inv.out.find("counter-model:") != std::string::npos);

    CliRun wrong = cli({"--input", testdata::data_path("suite/ll_split.ent"), "--expect", "valid"});
    CHECK(wrong.code == 1);

    CliRun budget = cli({"--input", testdata::data_path("suite/lls_llb_golden.ent"), "--node-budget", "3"});
    CHECK(budget.code == 3);
}
