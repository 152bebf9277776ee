#include "bifree/fock.hpp"

#include <algorithm>

namespace bifree {

namespace {

void applyToWord(const FockOp& op, const TensorWord& w, const Rational& c, FockVector& out) {
    const int n = static_cast<int>(w.size());
    switch (op.kind) {
        case FockOp::Kind::identity:
            out.add(w, c);
            return;
        case FockOp::Kind::project_vacuum:
            if (n == 0) out.add(w, c);
            return;
        case FockOp::Kind::project_len:
            if (n == op.len) out.add(w, c);
            return;
        case FockOp::Kind::q_weighted_len_sum:
            out.add(w, c * op.q.pow(n));
            return;
        case FockOp::Kind::create_left: {
            TensorWord nw;
            nw.reserve(n + 1);
            nw.push_back(op.label);
            nw.insert(nw.end(), w.begin(), w.end());
            out.add(nw, c);
            return;
        }
        case FockOp::Kind::create_right: {
            TensorWord nw(w);
            nw.push_back(op.label);
            out.add(nw, c);
            return;
        }
        case FockOp::Kind::annihilate_left: {
            // sum_k q^{k-1} <w_k, h> (drop k); kills the vacuum.
            for (int k = 1; k <= n; ++k) {
                if (w[k - 1] != op.label) continue;
                TensorWord nw;
                nw.reserve(n - 1);
                nw.insert(nw.end(), w.begin(), w.begin() + (k - 1));
                nw.insert(nw.end(), w.begin() + k, w.end());
                out.add(nw, c * op.q.pow(k - 1));
            }
            return;
        }
        case FockOp::Kind::annihilate_right: {
            // sum_k q^{n-k} <w_k, h> (drop k); kills the vacuum.
            for (int k = 1; k <= n; ++k) {
                if (w[k - 1] != op.label) continue;
                TensorWord nw;
                nw.reserve(n - 1);
                nw.insert(nw.end(), w.begin(), w.begin() + (k - 1));
                nw.insert(nw.end(), w.begin() + k, w.end());
                out.add(nw, c * op.q.pow(n - k));
            }
            return;
        }
    }
}

}  // namespace

FockVector apply_op(const FockOp& op, const FockVector& v) {
    FockVector out(v.depthCap());
    for (const auto& [w, c] : v.terms()) applyToWord(op, w, c, out);
    return out;
}

FockVector apply_word(std::span<const FockOp> ops, const FockVector& v) {
    FockVector cur = v;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        cur = apply_op(*it, cur);
        if (cur.isZero()) break;
    }
    return cur;
}

Rational q_inner(const TensorWord& u, const TensorWord& v, const Rational& q) {
    if (u.size() != v.size()) return Rational(0);
    const int n = static_cast<int>(u.size());
    if (n == 0) return Rational(1);
    if (n > 8) throw std::invalid_argument("q_inner: word length exceeds the factorial guard (8)");
    // Label multisets must agree or every permutation term vanishes.
    TensorWord us(u), vs(v);
    std::sort(us.begin(), us.end());
    std::sort(vs.begin(), vs.end());
    if (us != vs) return Rational(0);

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    Rational acc(0);
    do {
        bool match = true;
        for (int k = 0; k < n; ++k) {
            if (u[k] != v[perm[k]]) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        int inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inv;
        acc += q.pow(inv);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

Rational q_inner(const FockVector& u, const FockVector& v, const Rational& q) {
    Rational acc(0);
    for (const auto& [wu, cu] : u.terms())
        for (const auto& [wv, cv] : v.terms()) {
            if (wu.size() != wv.size()) continue;
            acc += cu * cv * q_inner(wu, wv, q);
        }
    return acc;
}

Rational vacuum_expectation(std::span<const FockOp> ops) {
    int creations = 0;
    for (const auto& op : ops)
        if (op.creates()) ++creations;
    FockVector cur = FockVector::vacuum(creations);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        cur = apply_op(*it, cur);
        if (cur.isZero()) break;
    }
    return cur.vacuumWeight();
}

std::string debug_json(const FockVector& v) {
    std::vector<std::pair<TensorWord, Rational>> terms(v.terms().begin(), v.terms().end());
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string s = "[";
    for (std::size_t t = 0; t < terms.size(); ++t) {
        if (t) s += ",";
        s += "{\"word\":[";
        for (std::size_t i = 0; i < terms[t].first.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(terms[t].first[i]);
        }
        s += "],\"weight\":\"" + terms[t].second.str() + "\"}";
    }
    s += "]";
    return s;
}

}  // namespace bifree
