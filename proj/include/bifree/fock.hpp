#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bifree/rational.hpp"

namespace bifree {

/// Opaque orthonormal basis label.  Inner products between labels are
/// Kronecker deltas on the packed value.
using Label = std::uint64_t;

/// Free-standing label, e.g. h_k.
inline Label named_label(std::uint64_t id) { return (1ull << 60) | id; }
/// Matrix-entry label h^k_{i,j}.
inline Label entry_label(int i, int j, int k) {
    return (2ull << 60) | (static_cast<std::uint64_t>(k) << 32) |
           (static_cast<std::uint64_t>(i) << 16) | static_cast<std::uint64_t>(j);
}
/// Doubly-indexed label h_{j,k} (index j within colour family k).
inline Label indexed_label(int j, int k) {
    return (3ull << 60) | (static_cast<std::uint64_t>(k) << 20) | static_cast<std::uint64_t>(j);
}

/// A basis tensor word; the empty word is the vacuum.
using TensorWord = std::vector<Label>;

struct TensorWordHash {
    std::size_t operator()(const TensorWord& w) const {
        std::uint64_t h = 1469598103934665603ull ^ (w.size() * 0x9e3779b97f4a7c15ull);
        for (Label l : w) {
            h ^= l;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

struct DepthOverflow : std::runtime_error {
    int required;
    explicit DepthOverflow(int req)
        : std::runtime_error("Fock depth cap exceeded; required depth " + std::to_string(req)),
          required(req) {}
};

/// Finite rational combination of tensor words, bounded by a depth cap.
/// Zero weights are never stored.
class FockVector {
public:
    explicit FockVector(int depth_cap = 64) : cap_(depth_cap) {}

    static FockVector vacuum(int depth_cap = 64) {
        FockVector v(depth_cap);
        v.add(TensorWord{}, Rational(1));
        return v;
    }

    int depthCap() const { return cap_; }
    bool isZero() const { return terms_.empty(); }
    std::size_t termCount() const { return terms_.size(); }
    const std::unordered_map<TensorWord, Rational, TensorWordHash>& terms() const {
        return terms_;
    }

    void add(const TensorWord& w, const Rational& c) {
        if (c.isZero()) return;
        if (static_cast<int>(w.size()) > cap_) throw DepthOverflow(static_cast<int>(w.size()));
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            terms_.emplace(w, c);
        } else {
            it->second += c;
            if (it->second.isZero()) terms_.erase(it);
        }
    }

    void addScaled(const FockVector& v, const Rational& c) {
        if (c.isZero()) return;
        for (const auto& [w, a] : v.terms_) add(w, a * c);
    }

    FockVector& operator+=(const FockVector& v) {
        addScaled(v, Rational(1));
        return *this;
    }

    FockVector scaled(const Rational& c) const {
        FockVector out(cap_);
        out.addScaled(*this, c);
        return out;
    }

    Rational coefficient(const TensorWord& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    /// Weight of the empty word.
    Rational vacuumWeight() const { return coefficient(TensorWord{}); }

    bool operator==(const FockVector& o) const {
        if (terms_.size() != o.terms_.size()) return false;
        for (const auto& [w, c] : terms_) {
            auto it = o.terms_.find(w);
            if (it == o.terms_.end() || it->second != c) return false;
        }
        return true;
    }

private:
    int cap_;
    std::unordered_map<TensorWord, Rational, TensorWordHash> terms_;
};

/// One creation/annihilation/projection operator on the q-Fock space.
struct FockOp {
    enum class Kind : std::uint8_t {
        create_left,       // prepends the label
        annihilate_left,   // q^{k-1}-weighted removals
        create_right,      // appends the label
        annihilate_right,  // q^{n-k}-weighted removals
        project_len,       // P_n
        project_vacuum,    // P_Omega
        identity,
        q_weighted_len_sum  // sum_n q^n P_n, evaluated lazily per word length
    };

    Kind kind = Kind::identity;
    Label label = 0;
    int len = 0;       // for project_len
    Rational q = 0;    // deformation parameter; shared across a composition

    static FockOp createLeft(Label h, Rational q) { return {Kind::create_left, h, 0, q}; }
    static FockOp annihilateLeft(Label h, Rational q) { return {Kind::annihilate_left, h, 0, q}; }
    static FockOp createRight(Label h, Rational q) { return {Kind::create_right, h, 0, q}; }
    static FockOp annihilateRight(Label h, Rational q) {
        return {Kind::annihilate_right, h, 0, q};
    }
    static FockOp projectLen(int n) { return {Kind::project_len, 0, n, Rational(0)}; }
    static FockOp projectVacuum() { return {Kind::project_vacuum, 0, 0, Rational(0)}; }
    static FockOp identityOp() { return {Kind::identity, 0, 0, Rational(0)}; }
    static FockOp qWeightedLenSum(Rational q) {
        return {Kind::q_weighted_len_sum, 0, 0, q};
    }

    /// True when applying this operator can increase word length.
    bool creates() const { return kind == Kind::create_left || kind == Kind::create_right; }
};

/// Linear extension of the operator action to a FockVector.
FockVector apply_op(const FockOp& op, const FockVector& v);

/// Composition applied right-to-left (ops.back() acts first).
FockVector apply_word(std::span<const FockOp> ops, const FockVector& v);

/// q-deformed inner product of basis words: delta on lengths, then the
/// permutation sum with q^{inversions} weights.  Guarded at length 8.
Rational q_inner(const TensorWord& u, const TensorWord& v, const Rational& q);

/// Bilinear extension to vectors (all scalars are real rationals).
Rational q_inner(const FockVector& u, const FockVector& v, const Rational& q);

/// Vacuum state of a composition: weight of the empty word in
/// ops applied right-to-left to the vacuum.  The depth cap defaults to the
/// number of creation operators in the expression.
Rational vacuum_expectation(std::span<const FockOp> ops);

/// Debug rendering: a JSON list of {"word": [labels], "weight": "p/q"},
/// in a deterministic word order.
std::string debug_json(const FockVector& v);

}  // namespace bifree
