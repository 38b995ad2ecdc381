#include "frontend_internal.hpp"

#include <cctype>
#include <sstream>

namespace shlide {

using detail::RawAtom;
using detail::RawDef;
using detail::RawHeap;

namespace {

struct SExp {
    bool atom = true;
    std::string tok;
    std::vector<SExp> kids;
    int line = 0;
    int col = 0;

    bool is(const std::string& s) const { return atom && tok == s; }
    bool head(const std::string& s) const { return !atom && !kids.empty() && kids[0].is(s); }
};

std::string show(const SExp& e) {
    if (e.atom) return e.tok;
    std::string s = "(";
    for (size_t i = 0; i < e.kids.size(); ++i) s += (i ? " " : "") + show(e.kids[i]);
    return s + ")";
}

class Reader {
public:
    explicit Reader(const std::string& t) : text_(t) {}

    std::vector<SExp> all() {
        std::vector<SExp> out;
        skip();
        while (i_ < text_.size()) {
            out.push_back(read());
            skip();
        }
        return out;
    }

    std::vector<std::string> role_lines;

private:
    void adv() {
        if (text_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    void skip() {
        while (i_ < text_.size()) {
            char c = text_[i_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                adv();
            } else if (c == ';') {
                size_t s = i_;
                while (i_ < text_.size() && text_[i_] != '\n') adv();
                std::string ln = text_.substr(s, i_ - s);
                size_t k = ln.find("roles:");
                if (k != std::string::npos && ln.rfind(";;", 0) == 0) role_lines.push_back(ln.substr(k + 6));
            } else {
                break;
            }
        }
    }

    SExp read() {
        skip();
        if (i_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
        SExp e;
        e.line = line_;
        e.col = col_;
        if (text_[i_] == '(') {
            adv();
            e.atom = false;
            skip();
            while (i_ < text_.size() && text_[i_] != ')') {
                e.kids.push_back(read());
                skip();
            }
            if (i_ >= text_.size()) throw ParseError("unbalanced parenthesis", e.line, e.col);
            adv();
            return e;
        }
        if (text_[i_] == ')') throw ParseError("unexpected ')'", line_, col_);
        if (text_[i_] == '|') {
            size_t s = ++i_;
            ++col_;
            while (i_ < text_.size() && text_[i_] != '|') adv();
            e.tok = text_.substr(s, i_ - s);
            if (i_ < text_.size()) adv();
            return e;
        }
        size_t s = i_;
        while (i_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[i_])) && text_[i_] != '(' &&
               text_[i_] != ')' && text_[i_] != ';')
            adv();
        e.tok = text_.substr(s, i_ - s);
        return e;
    }

    const std::string& text_;
    size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool is_int_token(const std::string& s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

class SlcompParser {
public:
    explicit SlcompParser(const std::string& text) : text_(text) {}

    ProblemFile run() {
        Reader rd(text_);
        std::vector<SExp> cmds = rd.all();
        for (const auto& ln : rd.role_lines) parse_roles(ln);

        ProblemFile p;
        std::vector<SExp> asserts;
        for (const auto& c : cmds) {
            if (c.atom || c.kids.empty() || !c.kids[0].atom) throw ParseError("expected a command", c.line, c.col);
            const std::string& h = c.kids[0].tok;
            if (h == "set-logic" || h == "check-sat" || h == "exit" || h == "set-option" || h == "get-model") continue;
            if (h == "set-info") {
                if (c.kids.size() >= 3 && c.kids[1].is(":status")) {
                    if (c.kids[2].is("unsat")) p.expect_valid = true;
                    else if (c.kids[2].is("sat")) p.expect_valid = false;
                }
            } else if (h == "declare-sort") {
                ref_sorts_.insert(at(c, 1).tok);
            } else if (h == "declare-datatypes") {
                declare_datatypes(c, p);
            } else if (h == "declare-heap") {
                for (size_t i = 1; i < c.kids.size(); ++i) heap_[at(c.kids[i], 0).tok] = at(c.kids[i], 1).tok;
            } else if (h == "declare-const" || h == "declare-fun") {
                const SExp& ty = c.kids.back();
                if (h == "declare-fun" && !at(c, 2).kids.empty()) throw UnsupportedConstruct("function symbol with arguments: " + show(c));
                globals_[at(c, 1).tok] = !ty.is("Int");
            } else if (h == "define-fun-rec") {
                define_pred(c, p);
            } else if (h == "assert") {
                asserts.push_back(at(c, 1));
            } else {
                throw UnsupportedConstruct("command " + show(c));
            }
        }
        resolve_field_types(p);
        detail::finish_registry(p.reg);

        const SExp *lhs = nullptr, *rhs = nullptr;
        if (asserts.size() == 1 && asserts[0].head("not") && at(asserts[0], 1).head("=>")) {
            lhs = &at(at(asserts[0], 1), 1);
            rhs = &at(at(asserts[0], 1), 2);
        } else if (asserts.size() == 2 && asserts[1].head("not")) {
            lhs = &asserts[0];
            rhs = &at(asserts[1], 1);
        } else {
            throw UnsupportedConstruct("entailment encoding: expected (assert (not (=> A C))) or (assert A) (assert (not C))");
        }
        RawHeap l, r;
        formula(*lhs, p.reg, {}, l);
        formula(*rhs, p.reg, {}, r);
        p.query = detail::build_query(l, r, p.reg, globals_, lhs->line, lhs->col);
        return p;
    }

private:
    static const SExp& at(const SExp& e, size_t i) {
        if (e.atom || i >= e.kids.size()) throw ParseError("malformed expression " + show(e), e.line, e.col);
        return e.kids[i];
    }

    void parse_roles(const std::string& ln) {
        std::istringstream is(ln);
        std::string name, r;
        is >> name;
        std::vector<Role> rs;
        while (is >> r) {
            if (r == "root") rs.push_back(Role::Root);
            else if (r == "seg") rs.push_back(Role::Segment);
            else if (r == "border") rs.push_back(Role::Border);
            else if (r == "trans") rs.push_back(Role::Transitivity);
            else if (r == "src") rs.push_back(Role::OrderSource);
            else if (r == "tgt") rs.push_back(Role::OrderTarget);
            else throw ParseError("unknown role " + r + " for " + name, 0, 0);
        }
        roles_[name] = rs;
    }

    void declare_datatypes(const SExp& c, ProblemFile& p) {
        const SExp& names = at(c, 1);
        const SExp& bodies = at(c, 2);
        for (size_t i = 0; i < names.kids.size() && i < bodies.kids.size(); ++i) {
            std::string dt = at(names.kids[i], 0).tok;
            const SExp& ctors = bodies.kids[i];
            if (ctors.kids.size() != 1) throw UnsupportedConstruct("datatype with several constructors: " + show(ctors));
            const SExp& ctor = ctors.kids[0];
            ctor_[at(ctor, 0).tok] = dt;
            SortDecl s;
            s.name = dt;
            for (size_t k = 1; k < ctor.kids.size(); ++k) s.fields.push_back({at(ctor.kids[k], 0).tok, at(ctor.kids[k], 1).tok});
            p.sort_order.push_back(dt);
            p.reg.add_sort(std::move(s));
        }
    }

    void resolve_field_types(ProblemFile& p) {
        for (auto& [_, s] : p.reg.sorts)
            for (auto& f : s.fields) {
                if (f.type == "Int") f.type = "int";
                else if (heap_.count(f.type)) f.type = heap_.at(f.type);
                else throw ParseError("field " + f.name + " has undeclared type " + f.type, 0, 0);
            }
    }

    Expr term(const SExp& e, const std::map<std::string, bool>& locals) {
        if (e.head("as") && at(e, 1).is("nil")) return Expr::null();
        if (e.head("-") && e.kids.size() == 2 && at(e, 1).atom && is_int_token(at(e, 1).tok))
            return Expr::lit(-BigInt(at(e, 1).tok));
        if (!e.atom) throw UnsupportedConstruct("term " + show(e));
        if (e.tok == "nil") return Expr::null();
        if (is_int_token(e.tok)) return Expr::lit(BigInt(e.tok));
        if (!locals.count(e.tok) && !globals_.count(e.tok))
            throw ParseError("undeclared variable " + e.tok, e.line, e.col);
        return Expr::var(e.tok);
    }

    void formula(const SExp& e, const Registry& reg, const std::map<std::string, bool>& locals, RawHeap& out) {
        auto raw = [&](RawAtom::Op op, const SExp& a, const SExp& b) {
            out.pure.push_back({op, term(a, locals), term(b, locals), e.line, e.col});
        };
        if (e.atom) {
            if (e.is("emp") || e.is("true")) return;
            if (e.is("false")) {
                out.pure.push_back({RawAtom::Op::False, Expr::null(), Expr::null(), e.line, e.col});
                return;
            }
            throw UnsupportedConstruct("formula " + show(e));
        }
        if (e.kids.empty()) throw UnsupportedConstruct("formula ()");
        const SExp& h = e.kids[0];
        if (!h.atom) {
            if (h.head("_") && h.kids.size() >= 2 && at(h, 1).is("emp")) return;
            throw UnsupportedConstruct("formula " + show(e));
        }
        const std::string& op = h.tok;
        if (op == "_" && e.kids.size() >= 2 && e.kids[1].is("emp")) return;
        if (op == "and" || op == "sep") {
            for (size_t i = 1; i < e.kids.size(); ++i) formula(e.kids[i], reg, locals, out);
        } else if (op == "pto") {
            const SExp& cell = at(e, 2);
            if (cell.atom || cell.kids.empty() || !ctor_.count(cell.kids[0].tok))
                throw UnsupportedConstruct("points-to target " + show(cell));
            std::vector<Expr> fields;
            for (size_t i = 1; i < cell.kids.size(); ++i) fields.push_back(term(cell.kids[i], locals));
            out.spatial.push_back(SpatialAtom::points_to(term(at(e, 1), locals), ctor_.at(cell.kids[0].tok), fields));
        } else if (op == "=") {
            raw(RawAtom::Op::Eq, at(e, 1), at(e, 2));
        } else if (op == "distinct") {
            for (size_t i = 1; i < e.kids.size(); ++i)
                for (size_t j = i + 1; j < e.kids.size(); ++j) raw(RawAtom::Op::Neq, e.kids[i], e.kids[j]);
        } else if (op == "not" && at(e, 1).head("=")) {
            raw(RawAtom::Op::Neq, at(at(e, 1), 1), at(at(e, 1), 2));
        } else if (op == "<=") {
            raw(RawAtom::Op::Le, at(e, 1), at(e, 2));
        } else if (op == ">=") {
            raw(RawAtom::Op::Ge, at(e, 1), at(e, 2));
        } else if (preds_.count(op)) {
            std::vector<Expr> args;
            for (size_t i = 1; i < e.kids.size(); ++i) args.push_back(term(e.kids[i], locals));
            out.spatial.push_back(SpatialAtom::pred(op, args));
        } else {
            throw UnsupportedConstruct(op + " in " + show(e));
        }
    }

    void define_pred(const SExp& c, ProblemFile& p) {
        RawDef d;
        d.name = at(c, 1).tok;
        d.line = c.line;
        d.col = c.col;
        auto rit = roles_.find(d.name);
        if (rit == roles_.end()) throw RoleAnnotationMissing("no ';; roles:' line for " + d.name);
        const SExp& params = at(c, 2);
        if (params.kids.size() != rit->second.size())
            throw RoleAnnotationMissing("roles for " + d.name + " do not match its parameter list");
        std::map<std::string, bool> locals;
        for (size_t i = 0; i < params.kids.size(); ++i) {
            std::string n = at(params.kids[i], 0).tok;
            bool ptr = !at(params.kids[i], 1).is("Int");
            d.params.push_back({n, rit->second[i]});
            d.declared[n] = ptr;
            locals[n] = ptr;
        }
        preds_.insert(d.name);
        const SExp& body = c.kids.back();
        if (!body.head("or") || body.kids.size() != 3) throw UnsupportedConstruct("definition body " + show(body));
        for (size_t b = 1; b <= 2; ++b) {
            const SExp* f = &body.kids[b];
            std::map<std::string, bool> scope = locals;
            std::vector<std::string> ex;
            bool has_ex = false;
            if (f->head("exists")) {
                has_ex = true;
                for (const auto& v : at(*f, 1).kids) {
                    std::string n = at(v, 0).tok;
                    ex.push_back(n);
                    scope[n] = !at(v, 1).is("Int");
                    d.declared[n] = scope[n];
                }
                f = &at(*f, 2);
            }
            RawHeap h;
            formula(*f, p.reg, scope, h);
            if (has_ex || !h.spatial.empty()) {
                d.exists = ex;
                d.rec = h;
            } else {
                d.base = h;
            }
        }
        p.reg.add_def(detail::build_def(d, p.reg));
    }

    const std::string& text_;
    std::map<std::string, std::vector<Role>> roles_;
    std::set<std::string> ref_sorts_;
    std::map<std::string, std::string> heap_;
    std::map<std::string, std::string> ctor_;
    std::map<std::string, bool> globals_;
    std::set<std::string> preds_;
};

}  // namespace

ProblemFile parse_slcomp(const std::string& text) { return SlcompParser(text).run(); }

}  // namespace shlide
