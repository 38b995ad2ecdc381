#include "frontend_internal.hpp"

#include <cctype>
#include <sstream>

namespace shlide {

using detail::RawAtom;
using detail::RawDef;
using detail::RawHeap;

namespace {

struct Tok {
    enum class Kind { Id, Int, Sym, End } kind = Kind::End;
    std::string s;
    int line = 1;
    int col = 1;
};

std::vector<Tok> lex(const std::string& text) {
    static const char* syms[] = {"|-", "/\\", "\\/", "->", ":=", "!=", "<=", ">=", "{", "}", "(", ")", ";",
                                 ",", ".",  ":",   "*",   "^",  "=",  "<",  ">",  "-"};
    std::vector<Tok> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (text.compare(i, 2, "//") == 0) {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Tok t;
        t.line = line;
        t.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                       text[j] == '\'' || text[j] == '#'))
                ++j;
            t.kind = Tok::Kind::Id;
            t.s = text.substr(i, j - i);
            advance(j - i);
            out.push_back(t);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            t.kind = Tok::Kind::Int;
            t.s = text.substr(i, j - i);
            advance(j - i);
            out.push_back(t);
            continue;
        }
        bool matched = false;
        for (const char* s : syms) {
            size_t n = std::char_traits<char>::length(s);
            if (text.compare(i, n, s) == 0) {
                t.kind = Tok::Kind::Sym;
                t.s = s;
                advance(n);
                out.push_back(t);
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    Tok end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

class NativeParser {
public:
    explicit NativeParser(const std::string& text) : toks_(lex(text)) {}

    ProblemFile run() {
        ProblemFile p;
        bool have_query = false;
        RawHeap ql, qr;
        int qline = 0, qcol = 0;
        while (peek().kind != Tok::Kind::End) {
            if (is_kw("data")) {
                parse_data(p);
            } else if (is_kw("pred")) {
                RawDef d = parse_pred(p.reg);
                p.reg.add_def(detail::build_def(d, p.reg));
            } else if (is_kw("check")) {
                if (have_query) fail("a problem file holds exactly one query");
                qline = peek().line;
                qcol = peek().col;
                next();
                ql = parse_heap(p.reg);
                expect_sym("|-");
                qr = parse_heap(p.reg);
                expect_sym(";");
                have_query = true;
            } else if (is_kw("expect")) {
                next();
                if (is_kw("valid")) p.expect_valid = true;
                else if (is_kw("invalid")) p.expect_valid = false;
                else fail("expected 'valid' or 'invalid'");
                next();
                expect_sym(";");
            } else {
                fail("expected 'data', 'pred', 'check' or 'expect'");
            }
        }
        if (!have_query) fail("missing 'check' query");
        detail::finish_registry(p.reg);
        p.query = detail::build_query(ql, qr, p.reg, {}, qline, qcol);
        return p;
    }

private:
    const Tok& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Tok& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool is_kw(const std::string& s) const { return peek().kind == Tok::Kind::Id && peek().s == s; }
    bool is_sym(const std::string& s, size_t k = 0) const { return peek(k).kind == Tok::Kind::Sym && peek(k).s == s; }
    [[noreturn]] void fail(const std::string& msg) const {
        const Tok& t = peek();
        std::string near = t.kind == Tok::Kind::End ? "end of input" : "'" + t.s + "'";
        throw ParseError(msg + " near " + near, t.line, t.col);
    }
    void expect_sym(const std::string& s) {
        if (!is_sym(s)) fail("expected '" + s + "'");
        next();
    }
    std::string expect_id() {
        if (peek().kind != Tok::Kind::Id) fail("expected an identifier");
        return next().s;
    }

    void parse_data(ProblemFile& p) {
        next();
        SortDecl s;
        s.name = expect_id();
        expect_sym("{");
        while (!is_sym("}")) {
            FieldDecl f;
            f.type = expect_id();
            f.name = expect_id();
            expect_sym(";");
            s.fields.push_back(f);
        }
        next();
        if (is_sym(";")) next();
        if (p.reg.sorts.count(s.name)) fail("sort " + s.name + " declared twice");
        p.sort_order.push_back(s.name);
        p.reg.add_sort(std::move(s));
        for (const auto& f : p.reg.sorts.at(p.sort_order.back()).fields)
            if (f.type != "int" && !p.reg.sorts.count(f.type) && f.type != p.sort_order.back())
                fail("unknown field type " + f.type);
    }

    static std::optional<Role> role_of(const std::string& s) {
        if (s == "root") return Role::Root;
        if (s == "seg") return Role::Segment;
        if (s == "border") return Role::Border;
        if (s == "trans") return Role::Transitivity;
        if (s == "src") return Role::OrderSource;
        if (s == "tgt") return Role::OrderTarget;
        return std::nullopt;
    }

    RawDef parse_pred(const Registry& reg) {
        RawDef d;
        d.line = peek().line;
        d.col = peek().col;
        next();
        d.name = expect_id();
        expect_sym("(");
        while (true) {
            std::string r = expect_id();
            auto role = role_of(r);
            if (!role) {
                --pos_;
                fail("expected a role annotation (root, seg, border, trans, src, tgt)");
            }
            d.params.push_back({expect_id(), *role});
            if (is_sym(",")) {
                next();
                continue;
            }
            expect_sym(")");
            break;
        }
        expect_sym(":=");
        for (int b = 0; b < 2; ++b) {
            if (b == 1) expect_sym("\\/");
            std::vector<std::string> ex;
            bool has_ex = false;
            if (is_kw("exists")) {
                has_ex = true;
                next();
                ex.push_back(expect_id());
                while (is_sym(",")) {
                    next();
                    ex.push_back(expect_id());
                }
                expect_sym(".");
            }
            RawHeap h = parse_heap(reg);
            bool recursive = has_ex || !h.spatial.empty();
            if (recursive) {
                d.exists = ex;
                d.rec = h;
            } else {
                d.base = h;
            }
        }
        expect_sym(";");
        return d;
    }

    Expr parse_term() {
        const Tok& t = peek();
        if (t.kind == Tok::Kind::Int) {
            next();
            return Expr::lit(BigInt(t.s));
        }
        if (is_sym("-") && peek(1).kind == Tok::Kind::Int) {
            next();
            return Expr::lit(-BigInt(next().s));
        }
        if (t.kind == Tok::Kind::Id) {
            if (t.s == "null" || t.s == "nil") {
                next();
                return Expr::null();
            }
            return Expr::var(next().s);
        }
        fail("expected a term");
    }

    std::vector<Expr> parse_args(const std::string& close) {
        std::vector<Expr> out;
        if (is_sym(close)) {
            next();
            return out;
        }
        while (true) {
            out.push_back(parse_term());
            if (is_sym(",")) {
                next();
                continue;
            }
            expect_sym(close);
            return out;
        }
    }

    // A conjunction of spatial atoms (joined by *) and pure atoms (joined by /\), in any order.
    RawHeap parse_heap(const Registry& reg) {
        RawHeap h;
        while (true) {
            parse_conjunct(h, reg);
            if (is_sym("*") || is_sym("/\\")) {
                next();
                continue;
            }
            return h;
        }
    }

    void parse_conjunct(RawHeap& h, const Registry& reg) {
        const Tok& t = peek();
        if (is_kw("emp") || is_kw("true")) {
            next();
            return;
        }
        if (is_kw("false")) {
            next();
            h.pure.push_back({RawAtom::Op::False, Expr::null(), Expr::null(), t.line, t.col});
            return;
        }
        if (t.kind == Tok::Kind::Id && is_sym("(", 1)) {
            std::string name = next().s;
            next();
            SpatialAtom a = SpatialAtom::pred(name, parse_args(")"));
            if (is_sym("^")) {
                next();
                if (peek().kind != Tok::Kind::Int) fail("expected an unfolding number");
                a.unfold = std::stoi(next().s);
            }
            h.spatial.push_back(a);
            return;
        }
        int line = t.line, col = t.col;
        Expr lhs = parse_term();
        if (is_sym("->")) {
            next();
            std::string sort = expect_id();
            std::vector<Expr> fields;
            if (is_sym("{")) {
                next();
                auto it = reg.sorts.find(sort);
                if (it == reg.sorts.end()) fail("unknown sort " + sort);
                std::vector<std::optional<Expr>> slots(it->second.fields.size());
                while (!is_sym("}")) {
                    std::string fname = expect_id();
                    expect_sym(":");
                    size_t k = 0;
                    while (k < it->second.fields.size() && it->second.fields[k].name != fname) ++k;
                    if (k == it->second.fields.size()) fail("sort " + sort + " has no field " + fname);
                    slots[k] = parse_term();
                    if (is_sym(",")) next();
                }
                next();
                for (size_t k = 0; k < slots.size(); ++k) {
                    if (!slots[k]) fail("field " + it->second.fields[k].name + " of " + sort + " is not given");
                    fields.push_back(*slots[k]);
                }
            } else {
                expect_sym("(");
                fields = parse_args(")");
            }
            h.spatial.push_back(SpatialAtom::points_to(lhs, sort, fields));
            return;
        }
        RawAtom a;
        a.line = line;
        a.col = col;
        a.lhs = lhs;
        if (is_sym("=")) a.op = RawAtom::Op::Eq;
        else if (is_sym("!=")) a.op = RawAtom::Op::Neq;
        else if (is_sym("<=")) a.op = RawAtom::Op::Le;
        else if (is_sym(">=")) a.op = RawAtom::Op::Ge;
        else if (is_sym("<") || is_sym(">")) fail("strict comparisons are not supported");
        else fail("expected '->', '=', '!=', '<=' or '>='");
        next();
        a.rhs = parse_term();
        h.pure.push_back(a);
    }

    std::vector<Tok> toks_;
    size_t pos_ = 0;
};

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

}  // namespace

ProblemFile parse_native(const std::string& text) { return NativeParser(text).run(); }

std::string print_def(const InductiveDef& d) {
    std::vector<std::string> ps;
    for (const auto& p : d.params) ps.push_back(to_string(p.role) + " " + p.name);
    std::string s = "pred " + d.name + "(" + join(ps, ", ") + ") := emp /\\ " + d.root_param() + "=" + d.seg_param();
    std::string sc, tg;
    if (d.has_order()) {
        sc = d.params[d.index_of(Role::OrderSource)].name;
        tg = d.params[d.index_of(Role::OrderTarget)].name;
        s += " /\\ " + sc + "=" + tg;
    }
    s += " \\/ ";
    if (!d.exists.empty()) s += "exists " + join(d.exists, ", ") + ". ";
    Spatial body{d.head};
    body.insert(body.end(), d.matrix.begin(), d.matrix.end());
    body.push_back(d.rec);
    s += to_string(body, false) + " /\\ " + d.root_param() + "!=" + d.seg_param();
    if (d.order_op) {
        switch (*d.order_op) {
            case OrderOp::Eq: s += " /\\ " + sc + "=" + d.order_next; break;
            case OrderOp::Le: s += " /\\ " + sc + "<=" + d.order_next; break;
            case OrderOp::Ge: s += " /\\ " + sc + ">=" + d.order_next; break;
        }
    }
    for (const auto& a : d.arith_side) s += " /\\ " + to_string(a);
    return s + ";";
}

std::string print_native(const ProblemFile& p) {
    std::ostringstream os;
    for (const auto& n : p.sort_order) {
        const SortDecl& s = p.reg.sort(n);
        os << "data " << s.name << " {";
        for (const auto& f : s.fields) os << " " << f.type << " " << f.name << ";";
        os << " }\n";
    }
    for (const auto& n : p.reg.def_order) os << print_def(p.reg.def(n)) << "\n";
    os << "check " << to_string(p.query.lhs, false) << " |- " << to_string(p.query.rhs, false) << ";\n";
    if (p.expect_valid) os << "expect " << (*p.expect_valid ? "valid" : "invalid") << ";\n";
    return os.str();
}

}  // namespace shlide
