#pragma once

#include "shlide/proof.hpp"

namespace shlide {

struct ParseError : std::runtime_error {
    int line = 0;
    int col = 0;
    ParseError(const std::string& msg, int l, int c)
        : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}
};

struct UnsupportedConstruct : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RoleAnnotationMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WellformednessError : std::runtime_error {
    WellformedReport report;
    WellformednessError(const std::string& def, WellformedReport r)
        : std::runtime_error(def + " violates " + r.condition + " (witness " + r.witness + "): " + r.message),
          report(std::move(r)) {}
};

struct ProblemFile {
    Registry reg;
    std::vector<std::string> sort_order;
    Entailment query;
    std::optional<bool> expect_valid;
};

// Both parsers run check_wellformed on every definition and throw
// WellformednessError on the first violation.
ProblemFile parse_native(const std::string& text);
ProblemFile parse_slcomp(const std::string& text);

std::string print_native(const ProblemFile& p);
std::string print_def(const InductiveDef& d);

// format: "text" or "dot"
std::string export_proof(const ProofTree& t, const std::string& format);

int run_cli(int argc, char** argv);

}  // namespace shlide
