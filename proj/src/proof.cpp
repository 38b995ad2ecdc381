#include "shlide/proof.hpp"

#include "shlide/pure.hpp"

#include <algorithm>
#include <functional>

namespace shlide {

bool ProofTree::is_ancestor(int a, int b) const {
    for (int p = node(b).parent; p >= 0; p = node(p).parent)
        if (p == a) return true;
    return false;
}

bool ProofTree::occ_descends(int b, int a) const {
    if (a < 0 || b < 0) return false;
    for (int o = b;;) {
        if (o == a) return true;
        auto it = occ_parent.find(o);
        if (it == occ_parent.end()) return false;
        o = it->second;
    }
}

namespace {

int find_root(const Spatial& k, const Expr& r, bool points_to, int skip = -1) {
    for (size_t i = 0; i < k.size(); ++i)
        if (static_cast<int>(i) != skip && k[i].root() == r && k[i].is_points_to() == points_to) return static_cast<int>(i);
    return -1;
}

bool has_root(const Spatial& k, const Expr& r) {
    for (const auto& a : k)
        if (a.root() == r) return true;
    return false;
}

bool field_is_pointer(const Registry& reg, const std::string& sort, size_t i) {
    auto it = reg.sorts.find(sort);
    if (it == reg.sorts.end() || i >= it->second.fields.size()) return true;
    return it->second.fields[i].is_pointer();
}

std::string join_label(const std::vector<std::string>& silent, const std::string& main) {
    std::string s;
    for (const auto& x : silent) s += x + "+";
    return s + main;
}

}  // namespace

Step Planner::plan(const Entailment& input) {
    Entailment e = input;
    std::vector<std::string> silent;
    auto axiom = [&](const std::string& name) {
        Step s;
        s.kind = Step::Kind::Axiom;
        s.main = name;
        s.label = join_label(silent, name);
        return s;
    };
    auto from_rule = [&](RuleResult r) {
        Step s;
        s.kind = Step::Kind::Rule;
        s.main = r.rule;
        s.label = join_label(silent, r.rule);
        s.premises = std::move(r.premises);
        s.elims = std::move(r.elims);
        return s;
    };
    auto single = [&](const std::string& name, Entailment p) {
        RuleResult r;
        r.rule = name;
        r.premises.push_back(std::move(p));
        r.elims.emplace_back();
        return from_rule(std::move(r));
    };
    auto stuck = [&](const std::string& tag) {
        Step s;
        s.kind = Step::Kind::Stuck;
        s.main = "Stuck";
        s.label = join_label(silent, "Stuck");
        s.invalid_case = tag;
        return s;
    };

    while (true) {
        PureState st(e.lhs.pure);
        if (!st.satisfiable()) return axiom("Inconsistency");
        if (same_spatial(e.lhs.spatial, e.rhs.spatial) && same_pure(e.lhs.pure, e.rhs.pure)) return axiom("Id");

        if (auto r = rule_eq_l(e)) {
            e = r->premises[0];
            silent.push_back("=L");
            continue;
        }
        if (auto r = rule_subst(e, params)) return from_rule(std::move(*r));
        if (auto r = rule_lbase(e, reg)) return from_rule(std::move(*r));
        if (auto r = rule_neq_null(e)) {
            e = r->premises[0];
            silent.push_back("NeqNull");
            continue;
        }
        if (auto r = rule_neq_star(e)) {
            e = r->premises[0];
            silent.push_back("NeqStar");
            continue;
        }
        if (auto r = rule_exm(e)) return from_rule(std::move(*r));
        for (const auto& a : e.rhs.spatial) {
            if (!a.is_pred() || a.root() == a.seg()) continue;
            if (st.status(a.root(), a.seg()) == PairStatus::Unknown) return from_rule(exm_on(e, a.root(), a.seg()));
        }

        if (e.lhs.spatial.empty() && e.rhs.spatial.empty() && e.rhs.pure.empty()) return axiom("Emp");

        {
            PureFormula kept;
            for (const auto& a : e.rhs.pure)
                if (!trivially_true(a) || a.kind == AtomKind::PtrNeq) kept.push_back(a);
            if (kept.size() < e.rhs.pure.size()) {
                e.rhs.pure = kept;
                silent.push_back("=R");
                continue;
            }
        }
        {
            bool changed = false;
            for (size_t j = 0; j < e.rhs.spatial.size(); ++j) {
                const auto& a = e.rhs.spatial[j];
                if (!a.is_pred() || !(a.root() == a.seg())) continue;
                const InductiveDef& d = reg.def(a.name);
                if (d.has_order())
                    add_atom(e.rhs.pure, PureAtom::aeq(a.args[d.index_of(Role::OrderTarget)], a.args[d.index_of(Role::OrderSource)]));
                e.rhs.spatial.erase(e.rhs.spatial.begin() + static_cast<long>(j));
                changed = true;
                break;
            }
            if (changed) {
                silent.push_back("RBase");
                continue;
            }
        }
        {
            PureFormula kept;
            for (const auto& a : e.rhs.pure)
                if (!st.entails(a)) kept.push_back(a);
            if (kept.size() < e.rhs.pure.size()) {
                Entailment p = e;
                p.rhs.pure = kept;
                return single("Hypothesis", std::move(p));
            }
        }

        // definite mismatches at a shared root
        for (const auto& l : e.lhs.spatial) {
            if (!l.is_points_to()) continue;
            for (const auto& r : e.rhs.spatial) {
                if (!(r.root() == l.root())) continue;
                if (r.is_points_to()) {
                    if (r.name != l.name || r.args.size() != l.args.size()) return stuck("2d");
                    for (size_t i = 0; i < l.args.size(); ++i)
                        if (!(l.args[i] == r.args[i]) && field_is_pointer(reg, l.name, i)) return stuck("2d");
                } else if (st.status(r.root(), r.seg()) == PairStatus::Distinct) {
                    if (reg.def(r.name).head.name != l.name) return stuck("2d");
                }
            }
        }

        // Star: peel matching points-to pairs, and identical predicate pairs
        {
            std::vector<bool> lused(e.lhs.spatial.size()), rused(e.rhs.spatial.size());
            PureFormula extra_rhs, extra_lhs;
            bool any = false;
            for (size_t j = 0; j < e.rhs.spatial.size(); ++j) {
                const auto& r = e.rhs.spatial[j];
                if (!r.is_points_to()) continue;
                int i = find_root(e.lhs.spatial, r.root(), true);
                if (i < 0 || lused[i]) continue;
                const auto& l = e.lhs.spatial[i];
                for (size_t k = 0; k < l.args.size(); ++k)
                    if (!(l.args[k] == r.args[k])) add_atom(extra_rhs, PureAtom::aeq(l.args[k], r.args[k]));
                lused[i] = rused[j] = true;
                any = true;
            }
            if (e.rhs.pure.empty()) {
                for (size_t j = 0; j < e.rhs.spatial.size(); ++j) {
                    const auto& r = e.rhs.spatial[j];
                    if (!r.is_pred()) continue;
                    for (size_t i = 0; i < e.lhs.spatial.size(); ++i) {
                        if (lused[i] || !e.lhs.spatial[i].same_shape(r)) continue;
                        lused[i] = rused[j] = true;
                        if (auto o = implied_order(e.lhs.spatial[i], reg)) add_atom(extra_lhs, *o);
                        any = true;
                        break;
                    }
                }
            }
            if (any) {
                Entailment matched, rest;
                for (size_t i = 0; i < e.lhs.spatial.size(); ++i) {
                    const auto& a = e.lhs.spatial[i];
                    (lused[i] ? matched.lhs.spatial : rest.lhs.spatial).push_back(a);
                }
                for (size_t j = 0; j < e.rhs.spatial.size(); ++j) {
                    const auto& a = e.rhs.spatial[j];
                    if (!rused[j]) {
                        rest.rhs.spatial.push_back(a);
                    } else if (a.is_points_to()) {
                        matched.rhs.spatial.push_back(e.lhs.spatial[find_root(e.lhs.spatial, a.root(), true)]);
                    } else {
                        matched.rhs.spatial.push_back(a);
                    }
                }
                rest.lhs.pure = e.lhs.pure;
                for (const auto& a : extra_lhs) add_atom(rest.lhs.pure, a);
                rest.rhs.pure = e.rhs.pure;
                for (const auto& a : extra_rhs) add_atom(rest.rhs.pure, a);
                matched.frame = e.frame;
                matched.frame.insert(matched.frame.end(), rest.lhs.spatial.begin(), rest.lhs.spatial.end());
                rest.frame = e.frame;
                rest.frame.insert(rest.frame.end(), matched.lhs.spatial.begin(), matched.lhs.spatial.end());
                RuleResult rr;
                rr.rule = "Star";
                if (!(rest.lhs.spatial.empty() && rest.rhs.spatial.empty())) {
                    rr.premises.push_back(std::move(matched));
                    rr.elims.emplace_back();
                }
                rr.premises.push_back(std::move(rest));
                rr.elims.emplace_back();
                return from_rule(std::move(rr));
            }
        }

        // RInd: unfold an RHS predicate against the LHS cell at its root
        for (size_t j = 0; j < e.rhs.spatial.size(); ++j) {
            const auto& occ = e.rhs.spatial[j];
            if (!occ.is_pred()) continue;
            if (st.status(occ.root(), occ.seg()) != PairStatus::Distinct) continue;
            if (find_root(e.rhs.spatial, occ.root(), true) >= 0) continue;
            int i = find_root(e.lhs.spatial, occ.root(), true);
            if (i < 0) continue;
            const SpatialAtom& cell = e.lhs.spatial[i];
            const InductiveDef& d = reg.def(occ.name);
            if (d.head.name != cell.name || d.head.args.size() != cell.args.size()) continue;
            Substitution sigma;
            for (size_t k = 0; k < d.head.args.size(); ++k) {
                const Expr& pat = d.head.args[k];
                if (pat.is_var() && std::find(d.exists.begin(), d.exists.end(), pat.name) != d.exists.end() &&
                    !sigma.count(pat.name))
                    sigma[pat.name] = cell.args[k];
            }
            for (const auto& x : d.exists)
                if (!sigma.count(x)) throw UnsupportedFragment("existential " + x + " of " + d.name + " is not a field of its head");
            SymbolicHeap body = instantiate_rec(d, occ, sigma);
            remove_atom(body.pure, PureAtom::neq(occ.root(), occ.seg()));
            Entailment p = e;
            p.rhs.spatial.erase(p.rhs.spatial.begin() + static_cast<long>(j));
            for (auto& a : body.spatial) {
                a.unfold = 0;
                a.occ = -1;
            }
            p.rhs.spatial.insert(p.rhs.spatial.begin() + static_cast<long>(j), body.spatial.begin(), body.spatial.end());
            for (const auto& a : body.pure) add_atom(p.rhs.pure, a);
            return single("RInd", std::move(p));
        }

        // LInd / Frame: unfold the LHS predicate with the greatest unfolding number
        {
            int best = -1;
            bool frame = false;
            for (size_t i = 0; i < e.lhs.spatial.size(); ++i) {
                const auto& a = e.lhs.spatial[i];
                if (!a.is_pred() || st.status(a.root(), a.seg()) != PairStatus::Distinct) continue;
                int rp = find_root(e.rhs.spatial, a.root(), true);
                int rq = find_root(e.rhs.spatial, a.root(), false);
                bool ok = rp >= 0 || (rq >= 0 && st.status(a.root(), e.rhs.spatial[rq].seg()) == PairStatus::Distinct);
                if (!ok) continue;
                if (best < 0 || a.unfold > e.lhs.spatial[best].unfold) {
                    best = static_cast<int>(i);
                    frame = rp >= 0;
                }
            }
            if (best >= 0) {
                SpatialAtom occ = e.lhs.spatial[best];
                const InductiveDef& d = reg.def(occ.name);
                Substitution ex;
                for (const auto& x : d.exists) ex[x] = Expr::var(fresh.fresh(x));
                SymbolicHeap body = instantiate_rec(d, occ, ex);
                Step s;
                s.kind = Step::Kind::Rule;
                s.main = frame ? "Frame" : "LInd";
                s.label = join_label(silent, s.main);
                s.unfolded_occ = occ.occ;
                for (auto& a : body.spatial) {
                    if (!a.is_pred()) continue;
                    a.occ = next_occ++;
                    s.new_occs.emplace_back(a.occ, occ.occ);
                }
                Entailment p = e;
                p.lhs.spatial.erase(p.lhs.spatial.begin() + best);
                p.lhs.spatial.insert(p.lhs.spatial.begin() + best, body.spatial.begin(), body.spatial.end());
                for (const auto& a : body.pure) add_atom(p.lhs.pure, a);
                s.premises.push_back(std::move(p));
                s.elims.emplace_back();
                return s;
            }
        }

        for (const auto& r : e.rhs.spatial) {
            bool allocated = r.is_points_to() || st.status(r.root(), r.seg()) == PairStatus::Distinct;
            if (allocated && !has_root(e.lhs.spatial, r.root())) return stuck("2c");
        }
        for (const auto& l : e.lhs.spatial)
            if (!has_root(e.rhs.spatial, l.root())) return stuck("2b");
        return stuck("2a");
    }
}

// ---- back-links ----

namespace {

bool match_expr(const Expr& b, const Expr& c, const std::set<std::string>& dom, Substitution& s) {
    if (b.is_var() && dom.count(b.name)) {
        auto it = s.find(b.name);
        if (it != s.end()) return it->second == c;
        s[b.name] = c;
        return true;
    }
    return b == c;
}

bool match_atom(const SpatialAtom& b, const SpatialAtom& c, const std::set<std::string>& dom, Substitution& s) {
    if (b.kind != c.kind || b.name != c.name || b.args.size() != c.args.size()) return false;
    if (b.is_points_to() && !match_expr(b.root_expr, c.root_expr, dom, s)) return false;
    for (size_t i = 0; i < b.args.size(); ++i)
        if (!match_expr(b.args[i], c.args[i], dom, s)) return false;
    return true;
}

using Pairing = std::vector<std::pair<int, int>>;  // (bud index, companion index) for LHS atoms

// Matches bud.lhs then bud.rhs atom-by-atom against the companion, calling
// `done` on every complete matching until it returns true.
bool match_heaps(const Entailment& bud, const Entailment& comp, const std::set<std::string>& dom, Substitution s,
                 Pairing& pairing, const std::function<bool(const Substitution&, const Pairing&)>& done) {
    if (bud.lhs.spatial.size() != comp.lhs.spatial.size() || bud.rhs.spatial.size() != comp.rhs.spatial.size()) return false;
    std::vector<bool> lused(comp.lhs.spatial.size()), rused(comp.rhs.spatial.size());
    std::function<bool(size_t, Substitution&)> go = [&](size_t i, Substitution& cur) -> bool {
        size_t nl = bud.lhs.spatial.size();
        if (i == nl + bud.rhs.spatial.size()) return done(cur, pairing);
        bool left = i < nl;
        const SpatialAtom& b = left ? bud.lhs.spatial[i] : bud.rhs.spatial[i - nl];
        const Spatial& cs = left ? comp.lhs.spatial : comp.rhs.spatial;
        auto& used = left ? lused : rused;
        for (size_t j = 0; j < cs.size(); ++j) {
            if (used[j]) continue;
            Substitution next = cur;
            if (!match_atom(b, cs[j], dom, next)) continue;
            used[j] = true;
            if (left) pairing.emplace_back(static_cast<int>(i), static_cast<int>(j));
            bool ok = go(i + 1, next);
            if (left) pairing.pop_back();
            used[j] = false;
            if (ok) {
                cur = next;
                return true;
            }
        }
        return false;
    };
    return go(0, s);
}

bool pure_matches(const Entailment& bud, const Entailment& comp, const Substitution& s) {
    if (!same_pure(substitute(bud.rhs.pure, s), comp.rhs.pure)) return false;
    PureFormula weakened = substitute(bud.lhs.pure, s);
    for (const auto& a : comp.lhs.pure)
        if (!contains(weakened, a)) return false;
    // the companion may rely on its frame, so the bud must carry at least that much
    Spatial bud_frame = substitute(bud.frame, s);
    for (const auto& f : comp.frame) {
        auto it = std::find_if(bud_frame.begin(), bud_frame.end(), [&](const SpatialAtom& g) { return g.same_shape(f); });
        if (it == bud_frame.end()) return false;
        bud_frame.erase(it);
    }
    return true;
}

std::set<std::string> link_domain(const Entailment& bud, const Entailment& comp) {
    std::set<std::string> bv;
    collect_vars(bud.lhs, bv);
    collect_vars(bud.rhs, bv);
    std::set<std::string> cv;
    collect_vars(comp.lhs, cv);
    collect_vars(comp.rhs, cv);
    std::set<std::string> dom;
    for (const auto& v : bv)
        if (!cv.count(v)) dom.insert(v);
    return dom;
}

}  // namespace

namespace {

std::vector<std::string> heap_names(const Spatial& k) {
    std::vector<std::string> out;
    for (const auto& a : k) out.push_back(a.name);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::optional<std::pair<int, Substitution>> link_back(const ProofTree& t, int leaf) {
    std::vector<int> anc;
    for (int p = t.node(leaf).parent; p >= 0; p = t.node(p).parent) anc.push_back(p);
    std::reverse(anc.begin(), anc.end());
    const Entailment& bud = t.node(leaf).ent;
    const auto bud_l = heap_names(bud.lhs.spatial), bud_r = heap_names(bud.rhs.spatial);
    for (int c : anc) {
        const Entailment& comp = t.node(c).ent;
        if (comp.lhs.spatial.size() != bud.lhs.spatial.size() || comp.rhs.spatial.size() != bud.rhs.spatial.size() ||
            comp.frame.size() > bud.frame.size())
            continue;
        bool may_progress = false;
        for (const auto& b : bud.lhs.spatial)
            for (const auto& a : comp.lhs.spatial)
                may_progress = may_progress || (b.is_pred() && a.is_pred() && b.unfold > a.unfold && t.occ_descends(b.occ, a.occ));
        if (!may_progress) continue;
        if (heap_names(comp.lhs.spatial) != bud_l || heap_names(comp.rhs.spatial) != bud_r) continue;
        std::set<std::string> dom = link_domain(bud, comp);
        Pairing pairing;
        Substitution found;
        bool ok = match_heaps(bud, comp, dom, {}, pairing, [&](const Substitution& s, const Pairing& pr) {
            bool progress = false;
            for (const auto& [bi, ci] : pr) {
                const auto& b = bud.lhs.spatial[bi];
                const auto& a = comp.lhs.spatial[ci];
                progress = progress || (b.is_pred() && b.unfold > a.unfold && t.occ_descends(b.occ, a.occ));
            }
            if (!progress || !pure_matches(bud, comp, s)) return false;
            found = s;
            return true;
        });
        if (ok) return std::make_pair(c, found);
    }
    return std::nullopt;
}

SoundnessReport check_cyclic_soundness(const ProofTree& t) {
    SoundnessReport rep;
    auto fail = [&](int c, int b, std::string msg) {
        rep.ok = false;
        rep.companion = c;
        rep.bud = b;
        rep.message = std::move(msg);
        return rep;
    };
    for (const auto& n : t.nodes) {
        if (n.status == NodeStatus::Open && n.children.empty()) return fail(-1, n.id, "open leaf");
        if (n.status == NodeStatus::Invalid) return fail(-1, n.id, "invalid leaf");
    }
    for (const auto& bl : t.backlinks) {
        int c = bl.companion, b = bl.bud;
        if (c < 0 || b < 0 || c >= static_cast<int>(t.nodes.size()) || b >= static_cast<int>(t.nodes.size()))
            return fail(c, b, "backlink endpoint out of range");
        if (!t.is_ancestor(c, b)) return fail(c, b, "companion is not a strict ancestor of the bud");
        const Entailment& bud = t.node(b).ent;
        const Entailment& comp = t.node(c).ent;
        Spatial bl_lhs = substitute(bud.lhs.spatial, bl.sigma);
        Spatial bl_rhs = substitute(bud.rhs.spatial, bl.sigma);
        if (!same_spatial(bl_lhs, comp.lhs.spatial) || !same_spatial(bl_rhs, comp.rhs.spatial))
            return fail(c, b, "substitution does not map the bud heap onto the companion");
        if (!pure_matches(bud, comp, bl.sigma)) return fail(c, b, "substitution does not map the bud pure part onto the companion");

        std::vector<int> unfolded;
        for (int p = t.node(b).parent;; p = t.node(p).parent) {
            const ProofNode& pn = t.node(p);
            bool lind = pn.rule.find("LInd") != std::string::npos || pn.rule.find("Frame") != std::string::npos;
            if (lind && pn.unfolded_occ >= 0) unfolded.push_back(pn.unfolded_occ);
            if (p == c) break;
        }
        bool progress = false;
        for (const auto& ba : bud.lhs.spatial) {
            if (!ba.is_pred()) continue;
            SpatialAtom mapped = substitute(ba, bl.sigma);
            for (const auto& ca : comp.lhs.spatial) {
                if (!ca.is_pred() || !mapped.same_shape(ca) || ba.occ == ca.occ) continue;
                if (!t.occ_descends(ba.occ, ca.occ)) continue;
                for (int u : unfolded)
                    if (u != ba.occ && t.occ_descends(u, ca.occ) && t.occ_descends(ba.occ, u)) progress = true;
            }
        }
        if (!progress) return fail(c, b, "no left unfolding of the traced occurrence on the cycle");
    }
    return rep;
}

// ---- search ----

namespace {

int first_open(const ProofTree& t) {
    std::vector<int> stack{t.root};
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        const ProofNode& pn = t.node(n);
        if (pn.status == NodeStatus::Open && pn.children.empty()) return n;
        for (auto it = pn.children.rbegin(); it != pn.children.rend(); ++it) stack.push_back(*it);
    }
    return -1;
}

int max_lhs_unfold(const Entailment& e) {
    int k = 0;
    for (const auto& a : e.lhs.spatial)
        if (a.is_pred()) k = std::max(k, a.unfold);
    return k;
}

std::set<std::string> used_predicates(const Entailment& e, const Registry& reg) {
    std::set<std::string> out;
    std::vector<std::string> work;
    for (const Spatial* k : {&e.lhs.spatial, &e.rhs.spatial})
        for (const auto& a : *k)
            if (a.is_pred()) work.push_back(a.name);
    while (!work.empty()) {
        std::string n = work.back();
        work.pop_back();
        if (!out.insert(n).second) continue;
        const InductiveDef& d = reg.def(n);
        for (const auto& m : d.matrix)
            if (m.is_pred()) work.push_back(m.name);
    }
    return out;
}

std::optional<HeapModel> lift_model(const HeapModel& m, const Entailment& root, const Substitution& elim,
                                    const Registry& reg) {
    HeapModel out;
    out.heap = m.heap;
    int next = 0;
    for (const auto& [l, _] : m.heap) next = std::max(next, l);
    for (const auto& [_, v] : m.stack)
        if (v.is_loc()) next = std::max(next, v.loc_id());
    auto sorts = var_sorts(root, reg);
    for (const auto& v : free_vars(root)) {
        Expr x = elim.count(v) ? elim.at(v) : Expr::var(v);
        if (x.is_null()) out.stack[v] = Value::null();
        else if (x.is_int()) out.stack[v] = Value::num(x.value);
        else if (m.stack.count(x.name)) out.stack[v] = m.stack.at(x.name);
        else {
            bool ptr = !sorts.count(v) || sorts.at(v);
            out.stack[v] = ptr ? Value::loc(++next) : Value::num(0);
        }
    }
    if (!eval(out, root.lhs, reg) || eval(out, root.rhs, reg)) return std::nullopt;
    return out;
}

std::optional<HeapModel> find_witness(const ProofTree& t, int leaf, const Registry& reg, const ProveOptions& opt) {
    const Entailment& root = t.node(t.root).ent;
    const Entailment& le = t.node(leaf).ent;
    std::vector<int> path;
    for (int n = leaf; n >= 0; n = t.node(n).parent) path.push_back(n);
    std::reverse(path.begin(), path.end());
    Substitution acc;
    for (size_t i = 1; i < path.size(); ++i) acc = compose_elim(acc, t.node(path[i]).elim);

    FreshNames fn;
    Spatial all = le.lhs.spatial;
    all.insert(all.end(), le.frame.begin(), le.frame.end());
    SymbolicHeap base = base_of(all, reg, fn);
    for (const auto& a : le.lhs.pure) add_atom(base.pure, a);

    std::vector<std::pair<SymbolicHeap, Substitution>> variants{{base, acc}};
    PureState st(le.lhs.pure);
    for (const auto& a : le.rhs.pure) {
        if (st.entails(a)) continue;
        if (a.kind == AtomKind::PtrEq) {
            SymbolicHeap v = base;
            add_atom(v.pure, PureAtom::neq(a.lhs, a.rhs));
            variants.emplace_back(v, acc);
        } else if (a.kind == AtomKind::PtrNeq && (a.lhs.is_var() || a.rhs.is_var())) {
            Substitution s = a.lhs.is_var() ? Substitution{{a.lhs.name, a.rhs}} : Substitution{{a.rhs.name, a.lhs}};
            variants.emplace_back(substitute(base, s), compose_elim(acc, s));
        }
    }
    for (const auto& [h, el] : variants) {
        try {
            HeapModel m = bad_model(h, reg);
            if (auto w = lift_model(m, root, el, reg)) return w;
        } catch (const std::exception&) {
        }
    }
    OracleResult r = oracle_entails(root, reg, opt.oracle_bound);
    if (!r.valid) return r.counter;
    return std::nullopt;
}

}  // namespace

std::vector<Entailment> apply_rule(const Entailment& leaf, const std::string& rule, Planner& pl) {
    Step s = pl.plan(leaf);
    if (s.kind == Step::Kind::Stuck)
        throw SideConditionFailed(rule + " does not apply: the leaf is stuck (case " + s.invalid_case + ")");
    std::vector<std::string> parts;
    for (size_t i = 0, j; i <= s.label.size(); i = j + 1) {
        j = s.label.find('+', i);
        if (j == std::string::npos) j = s.label.size();
        parts.push_back(s.label.substr(i, j - i));
    }
    if (std::find(parts.begin(), parts.end(), rule) == parts.end())
        throw SideConditionFailed(rule + " does not apply here; the leaf reduces by " + s.label);
    return s.premises;
}

ClosedResult is_closed(const ProofTree& t, const Registry& reg) {
    ClosedResult r;
    for (const auto& n : t.nodes)
        if (n.status == NodeStatus::Invalid) {
            r.kind = ClosedResult::Kind::Invalid;
            r.node = n.id;
            r.info = n.invalid_case;
            return r;
        }
    int leaf = first_open(t);
    if (leaf < 0) {
        r.kind = ClosedResult::Kind::Valid;
        return r;
    }
    Planner pl{reg, free_vars(t.node(t.root).ent), {}, 1 << 20};
    Step s = pl.plan(t.node(leaf).ent);
    r.node = leaf;
    if (s.kind == Step::Kind::Stuck) {
        r.kind = ClosedResult::Kind::Invalid;
        r.info = s.invalid_case;
    } else {
        r.kind = ClosedResult::Kind::Unknown;
        r.info = s.main;
    }
    return r;
}

Verdict prove(const Entailment& input, const Registry& reg, const ProveOptions& opt) {
    for (const auto& name : used_predicates(input, reg)) {
        WellformedReport w = check_wellformed(reg.def(name), reg);
        if (!w.ok) throw UnsupportedFragment(name + " violates " + w.condition + ": " + w.message);
    }
    std::set<std::string> lv = free_vars(input.lhs);
    for (const auto& v : free_vars(input.rhs))
        if (!lv.count(v)) throw UnsupportedFragment("variable " + v + " occurs only on the right-hand side");

    Verdict v;
    Planner pl{reg, free_vars(input), {}, 1};
    ProofTree& t = v.tree;
    ProofNode root;
    root.ent = input;
    root.ent.frame.clear();
    for (auto& a : root.ent.lhs.spatial) {
        a.unfold = 0;
        a.occ = a.is_pred() ? pl.next_occ++ : -1;
    }
    for (auto& a : root.ent.rhs.spatial) {
        a.unfold = 0;
        a.occ = -1;
    }
    t.nodes.push_back(root);

    // open leaves, leftmost on top
    std::vector<int> pending{t.root};
    // children not yet closed, per node; used to release finished subtrees
    std::vector<int> open_kids{0};
    std::set<int> companions;
    auto close = [&](int id) {
        while (id >= 0) {
            ProofNode& n = t.node(id);
            if (!opt.retain_closed && n.status != NodeStatus::Bud && !companions.count(id)) n.ent = Entailment{};
            if (n.parent < 0 || --open_kids[static_cast<size_t>(n.parent)] > 0) return;
            id = n.parent;
        }
    };
    while (!pending.empty()) {
        int leaf = pending.back();
        pending.pop_back();
        if (static_cast<long>(t.nodes.size()) > opt.node_budget)
            throw ResourceLimit("node budget of " + std::to_string(opt.node_budget) + " exceeded");
        v.max_unfold = std::max(v.max_unfold, max_lhs_unfold(t.node(leaf).ent));
        if (auto lb = link_back(t, leaf)) {
            ProofNode& n = t.node(leaf);
            n.status = NodeStatus::Bud;
            n.companion = lb->first;
            n.sigma = lb->second;
            t.backlinks.push_back({lb->first, leaf, lb->second});
            companions.insert(lb->first);
            close(leaf);
            continue;
        }
        Step s = pl.plan(t.node(leaf).ent);
        ProofNode& n = t.node(leaf);
        n.rule = s.label;
        if (s.kind == Step::Kind::Axiom) {
            n.status = NodeStatus::Valid;
            n.axiom = s.label;
            close(leaf);
            continue;
        }
        if (s.kind == Step::Kind::Stuck) {
            n.status = NodeStatus::Invalid;
            n.invalid_case = s.invalid_case;
            v.valid = false;
            v.stuck = leaf;
            v.invalid_case = s.invalid_case;
            if (opt.counter_model) v.witness = find_witness(t, leaf, reg, opt);
            return v;
        }
        n.unfolded_occ = s.unfolded_occ;
        for (const auto& [c, p] : s.new_occs) t.occ_parent[c] = p;
        for (size_t i = 0; i < s.premises.size(); ++i) {
            ProofNode child;
            child.id = static_cast<int>(t.nodes.size());
            child.ent = std::move(s.premises[i]);
            child.parent = leaf;
            child.elim = s.elims[i];
            v.max_unfold = std::max(v.max_unfold, max_lhs_unfold(child.ent));
            t.node(leaf).children.push_back(child.id);
            t.nodes.push_back(std::move(child));
            open_kids.push_back(0);
        }
        open_kids[static_cast<size_t>(leaf)] = static_cast<int>(s.premises.size());
        const auto& kids = t.node(leaf).children;
        pending.insert(pending.end(), kids.rbegin(), kids.rend());
    }
    v.valid = true;
    SoundnessReport rep = check_cyclic_soundness(t);
    if (!rep.ok) throw SideConditionFailed("emitted proof fails the global soundness check: " + rep.message);
    return v;
}

}  // namespace shlide
