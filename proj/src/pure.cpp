#include "shlide/pure.hpp"

namespace shlide {

PureState::PureState(const PureFormula& pi) {
    // pointer terms
    auto add_ptr = [&](const Expr& e) {
        if (!ptr_index_.count(e)) {
            int id = static_cast<int>(parent_.size());
            ptr_index_[e] = id;
            parent_.push_back(id);
        }
    };
    add_ptr(Expr::null());
    for (const auto& a : pi) {
        if (a.is_pointer()) {
            add_ptr(a.lhs);
            add_ptr(a.rhs);
        }
    }
    for (const auto& a : pi) {
        if (a.kind == AtomKind::PtrEq) {
            int x = find(ptr_index_.at(a.lhs)), y = find(ptr_index_.at(a.rhs));
            if (x != y) parent_[x] = y;
        }
    }
    for (const auto& a : pi) {
        if (a.kind == AtomKind::PtrNeq) {
            int x = find(ptr_index_.at(a.lhs)), y = find(ptr_index_.at(a.rhs));
            if (x == y) sat_ = false;
            neq_.emplace_back(ptr_index_.at(a.lhs), ptr_index_.at(a.rhs));
        }
        if (a.kind == AtomKind::False) sat_ = false;
    }

    // arithmetic difference constraints
    arith_index_["#zero"] = 0;
    for (const auto& a : pi) {
        if (a.kind != AtomKind::ArithEq && a.kind != AtomKind::ArithLeq) continue;
        for (const Expr* e : {&a.lhs, &a.rhs})
            if (e->is_var() && !arith_index_.count(e->name)) {
                int id = static_cast<int>(arith_index_.size());
                arith_index_[e->name] = id;
            }
    }
    size_t n = arith_index_.size();
    dist_.assign(n, std::vector<std::optional<BigInt>>(n));
    for (size_t i = 0; i < n; ++i) dist_[i][i] = BigInt(0);
    // u - v <= w  is an edge v -> u of weight w
    auto edge = [&](const Expr& u, const Expr& v, BigInt w) {
        int iu = arith_id(u), iv = arith_id(v);
        if (u.is_int()) w -= u.value;
        if (v.is_int()) w += v.value;
        auto& d = dist_[iv][iu];
        if (!d || w < *d) d = w;
    };
    for (const auto& a : pi) {
        if (a.kind == AtomKind::ArithLeq) {
            edge(a.lhs, a.rhs, 0);
        } else if (a.kind == AtomKind::ArithEq) {
            edge(a.lhs, a.rhs, 0);
            edge(a.rhs, a.lhs, 0);
        }
    }
    for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i) {
            if (!dist_[i][k]) continue;
            for (size_t j = 0; j < n; ++j) {
                if (!dist_[k][j]) continue;
                BigInt c = *dist_[i][k] + *dist_[k][j];
                if (!dist_[i][j] || c < *dist_[i][j]) dist_[i][j] = c;
            }
        }
    for (size_t i = 0; i < n; ++i)
        if (*dist_[i][i] < 0) sat_ = false;
}

int PureState::ptr_id(const Expr& e) const {
    auto it = ptr_index_.find(e);
    return it == ptr_index_.end() ? -1 : it->second;
}

int PureState::find(int x) const {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

int PureState::arith_id(const Expr& e) const {
    if (!e.is_var()) return 0;
    auto it = arith_index_.find(e.name);
    return it == arith_index_.end() ? -1 : it->second;
}

std::optional<BigInt> PureState::bound(int from, int to) const {
    if (from < 0 || to < 0) return std::nullopt;
    return dist_[from][to];
}

bool PureState::entails_diff(const Expr& u, const Expr& v, const BigInt& w) const {
    if (u == v) return w >= 0;
    BigInt c = w;
    if (u.is_int()) c -= u.value;
    if (v.is_int()) c += v.value;
    int iu = arith_id(u), iv = arith_id(v);
    if (iu == iv && iu >= 0) return c >= 0;
    auto b = bound(iv, iu);
    return b && *b <= c;
}

PairStatus PureState::status(const Expr& a, const Expr& b) const {
    if (!sat_) return PairStatus::Equal;
    if (a == b) return PairStatus::Equal;
    int ia = ptr_id(a), ib = ptr_id(b);
    if (ia < 0 || ib < 0) return PairStatus::Unknown;
    int ra = find(ia), rb = find(ib);
    if (ra == rb) return PairStatus::Equal;
    for (const auto& [x, y] : neq_) {
        int rx = find(x), ry = find(y);
        if ((rx == ra && ry == rb) || (rx == rb && ry == ra)) return PairStatus::Distinct;
    }
    return PairStatus::Unknown;
}

bool PureState::entails(const PureAtom& a) const {
    if (!sat_) return true;
    switch (a.kind) {
        case AtomKind::False: return false;
        case AtomKind::PtrEq: return status(a.lhs, a.rhs) == PairStatus::Equal;
        case AtomKind::PtrNeq: return status(a.lhs, a.rhs) == PairStatus::Distinct;
        case AtomKind::ArithLeq: return entails_diff(a.lhs, a.rhs, 0);
        case AtomKind::ArithEq: return entails_diff(a.lhs, a.rhs, 0) && entails_diff(a.rhs, a.lhs, 0);
    }
    return false;
}

bool PureState::entails(const PureFormula& p) const {
    for (const auto& a : p)
        if (!entails(a)) return false;
    return true;
}

std::map<std::string, BigInt> PureState::arith_model() const {
    // x_i = min(0, min_j dist[j][i]) shifted so that the zero node is 0:
    // a virtual source with 0-edges to every node gives a feasible potential.
    size_t n = arith_index_.size();
    std::vector<BigInt> pot(n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (dist_[j][i] && *dist_[j][i] < pot[i]) pot[i] = *dist_[j][i];
    std::map<std::string, BigInt> out;
    for (const auto& [name, id] : arith_index_) {
        if (id == 0) continue;
        out[name] = pot[id] - pot[0];
    }
    return out;
}

bool satisfiable(const PureFormula& pi) { return PureState(pi).satisfiable(); }

bool entails(const PureFormula& pi, const PureFormula& goal) { return PureState(pi).entails(goal); }

PairStatus status_of_pair(const PureFormula& pi, const Expr& a, const Expr& b) { return PureState(pi).status(a, b); }

}  // namespace shlide
