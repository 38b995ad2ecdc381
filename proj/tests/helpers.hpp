#pragma once

#include "shlide/frontend.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace testdata {

inline const char* const LL =
    "data c1 { c1 next; }\n"
    "pred ll(root r, seg F) := emp /\\ r=F \\/ exists X. r->c1(X) * ll(X, F) /\\ r!=F;\n";

inline const char* const LLS_LLB =
    "data c4 { c4 next; int val; }\n"
    "pred lls(root r, seg F, src mi, tgt ma) := emp /\\ r=F /\\ mi=ma \\/ "
    "exists X, mi1. r->c4(X, mi1) * lls(X, F, mi1, ma) /\\ r!=F /\\ mi<=mi1;\n"
    "pred llb(root r, seg F, trans b) := emp /\\ r=F \\/ exists X, d. r->c4(X, d) * llb(X, F, b) /\\ r!=F /\\ b<=d;\n";

inline const char* const NLL =
    "data c1 { c1 next; }\n"
    "data c3 { c3 next; c1 down; }\n"
    "pred ll(root r, seg F) := emp /\\ r=F \\/ exists X. r->c1(X) * ll(X, F) /\\ r!=F;\n"
    "pred nll(root r, seg F, border B) := emp /\\ r=F \\/ exists X, Z. r->c3(X, Z) * ll(Z, B) * nll(X, F, B) /\\ r!=F;\n";

inline const char* const TREE =
    "data c1 { c1 next; }\n"
    "data ct { ct left; ct right; }\n"
    "pred ll(root r, seg F) := emp /\\ r=F \\/ exists X. r->c1(X) * ll(X, F) /\\ r!=F;\n"
    "pred tree(root r, seg B) := emp /\\ r=B \\/ exists L, R. r->ct(L, R) * tree(L, B) * tree(R, B) /\\ r!=B;\n";

inline shlide::ProblemFile problem(const std::string& defs, const std::string& query) {
    return shlide::parse_native(defs + "check " + query + ";\n");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string data_path(const std::string& rel) { return std::string(SHLIDE_TEST_DATA) + "/" + rel; }

}  // namespace testdata
