#include "shlide/frontend.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace shlide {

namespace {

namespace fs = std::filesystem;

enum Exit { Ok = 0, Mismatch = 1, BadInput = 2, Limit = 3, OracleDisagrees = 4 };

struct Options {
    std::string input;
    std::string format;
    std::string proof_out;
    std::string proof_format = "text";
    bool oracle_check = false;
    int oracle_depth = Bound{}.max_unfold;
    int oracle_locs = Bound{}.locs;
    long node_budget = ProveOptions{}.node_budget;
    std::string expect;
    bool quiet = false;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ProblemFile load(const fs::path& p, const std::string& format) {
    std::string fmt = format;
    if (fmt.empty()) fmt = (p.extension() == ".smt2" || p.extension() == ".smt") ? "slcomp" : "native";
    std::string text = slurp(p);
    return fmt == "slcomp" ? parse_slcomp(text) : parse_native(text);
}

// Runs one problem; `out` receives the report, the first line being the verdict.
int solve(const fs::path& p, const Options& o, std::ostream& out, std::ostream& err) {
    ProblemFile pf;
    try {
        pf = load(p, o.format);
    } catch (const std::exception& e) {
        err << p.string() << ": " << e.what() << "\n";
        return BadInput;
    }
    ProveOptions po;
    po.node_budget = o.node_budget;
    po.oracle_bound.max_unfold = o.oracle_depth;
    po.oracle_bound.locs = o.oracle_locs;
    Verdict v;
    try {
        v = prove(pf.query, pf.reg, po);
    } catch (const ResourceLimit& e) {
        err << p.string() << ": resource limit: " << e.what() << "\n";
        return Limit;
    } catch (const UnsupportedFragment& e) {
        err << p.string() << ": unsupported: " << e.what() << "\n";
        return BadInput;
    }
    out << (v.valid ? "VALID" : "INVALID") << "\n";
    int code = Ok;
    if (o.oracle_check) {
        OracleResult r = oracle_entails(pf.query, pf.reg, po.oracle_bound);
        bool agrees = r.valid == v.valid;
        out << (agrees ? "ORACLE-AGREES" : "ORACLE-DISAGREES") << "\n";
        if (!agrees) code = OracleDisagrees;
    }
    if (!o.quiet) {
        out << "entailment: " << to_string(pf.query) << "\n";
        if (v.valid) {
            out << "proof: " << v.tree.nodes.size() << " nodes, " << v.tree.backlinks.size() << " backlinks\n";
        } else {
            if (!v.invalid_case.empty()) out << "case: " << v.invalid_case << "\n";
            if (v.witness) out << "counter-model:\n" << to_string(*v.witness);
        }
    }
    if (!o.proof_out.empty()) {
        std::ofstream f(o.proof_out, std::ios::binary);
        f << export_proof(v.tree, o.proof_format);
    }
    std::optional<bool> expect;
    if (o.expect == "valid") expect = true;
    else if (o.expect == "invalid") expect = false;
    else expect = pf.expect_valid;
    if (code == Ok && expect && *expect != v.valid) code = Mismatch;
    return code;
}

}  // namespace

int run_cli(int argc, char** argv) {
    Options o;
    CLI::App app{"cyclic-proof entailment checker for symbolic heaps with linear inductive predicates"};
    app.add_option("--input", o.input, "problem file or directory of problems")->required();
    app.add_option("--format", o.format, "input format (default by extension)")->check(CLI::IsMember({"native", "slcomp"}));
    app.add_option("--proof-out", o.proof_out, "write the proof tree to FILE");
    app.add_option("--proof-format", o.proof_format, "proof format")->check(CLI::IsMember({"text", "dot"}));
    app.add_flag("--oracle-check", o.oracle_check, "compare the verdict with the bounded-model oracle");
    app.add_option("--oracle-depth", o.oracle_depth, "oracle unfolding depth")->check(CLI::PositiveNumber);
    app.add_option("--oracle-locs", o.oracle_locs, "oracle location count")->check(CLI::PositiveNumber);
    app.add_option("--node-budget", o.node_budget, "proof search node budget")->check(CLI::PositiveNumber);
    app.add_option("--expect", o.expect, "expected verdict")->check(CLI::IsMember({"valid", "invalid"}));
    app.add_flag("--quiet", o.quiet, "print only verdict lines");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? Ok : BadInput;
    }

    fs::path in(o.input);
    if (!fs::is_directory(in)) return solve(in, o, std::cout, std::cerr);

    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(in)) {
        auto ext = de.path().extension();
        if (de.is_regular_file() && (ext == ".ent" || ext == ".smt2")) files.push_back(de.path());
    }
    std::sort(files.begin(), files.end());
    if (!o.proof_out.empty() && files.size() > 1) {
        std::cerr << "--proof-out needs a single input file\n";
        return BadInput;
    }
    int worst = Ok;
    for (const auto& f : files) {
        std::ostringstream out;
        int rc = solve(f, o, out, std::cerr);
        std::string first = out.str().substr(0, out.str().find('\n'));
        std::cout << (first.empty() ? "ERROR" : first) << " " << f.filename().string();
        if (rc != Ok) std::cout << " (exit " << rc << ")";
        std::cout << "\n";
        worst = std::max(worst, rc);
    }
    return worst;
}

}  // namespace shlide
