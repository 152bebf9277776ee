#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "bifree/fock.hpp"
#include "bifree/partition.hpp"
#include "bifree/rational.hpp"

namespace bifree {

/// Exact rational N x N matrix (row-major).
struct RationalMatrix {
    int N = 0;
    std::vector<Rational> a;

    RationalMatrix() = default;
    explicit RationalMatrix(int n) : N(n), a(static_cast<std::size_t>(n) * n, Rational(0)) {}

    Rational& at(int i, int j) { return a[static_cast<std::size_t>(i - 1) * N + (j - 1)]; }
    const Rational& at(int i, int j) const {
        return a[static_cast<std::size_t>(i - 1) * N + (j - 1)];
    }

    static RationalMatrix identity(int n) {
        RationalMatrix m(n);
        for (int i = 1; i <= n; ++i) m.at(i, i) = Rational(1);
        return m;
    }

    Rational trace() const {
        Rational t(0);
        for (int i = 1; i <= N; ++i) t += at(i, i);
        return t;
    }

    friend RationalMatrix operator*(const RationalMatrix& x, const RationalMatrix& y) {
        RationalMatrix out(x.N);
        for (int i = 1; i <= x.N; ++i)
            for (int k = 1; k <= x.N; ++k) {
                if (x.at(i, k).isZero()) continue;
                for (int j = 1; j <= x.N; ++j) out.at(i, j) += x.at(i, k) * y.at(k, j);
            }
        return out;
    }

    bool operator==(const RationalMatrix& o) const { return N == o.N && a == o.a; }
};

/// One matrix entry: a rational combination of operator words, applied
/// right-to-left.  An empty op word is a scalar multiple of the identity.
struct OperatorEntry {
    struct Term {
        Rational coeff;
        std::vector<FockOp> ops;
    };
    std::vector<Term> terms;

    bool isZero() const { return terms.empty(); }

    static OperatorEntry zero() { return {}; }
    static OperatorEntry scalar(Rational c) {
        OperatorEntry e;
        if (!c.isZero()) e.terms.push_back({std::move(c), {}});
        return e;
    }
    static OperatorEntry single(FockOp op) {
        OperatorEntry e;
        e.terms.push_back({Rational(1), {std::move(op)}});
        return e;
    }

    OperatorEntry& add(Rational c, std::vector<FockOp> ops) {
        if (!c.isZero()) terms.push_back({std::move(c), std::move(ops)});
        return *this;
    }

    /// Largest number of creation operators in any term (depth bookkeeping).
    int maxCreations() const {
        int m = 0;
        for (const auto& t : terms) {
            int c = 0;
            for (const auto& op : t.ops)
                if (op.creates()) ++c;
            m = std::max(m, c);
        }
        return m;
    }

    void applyInto(const FockVector& v, FockVector& out) const {
        for (const auto& t : terms) {
            FockVector cur = v;
            for (auto it = t.ops.rbegin(); it != t.ops.rend(); ++it) {
                cur = apply_op(*it, cur);
                if (cur.isZero()) break;
            }
            out.addScaled(cur, t.coeff);
        }
    }
};

/// N x N matrix of operator entries acting on matrices of Fock vectors.
/// side selects the action: left matrices multiply by rows, right matrices
/// act through the twisted right multiplication.  The stored entries carry
/// no normalization; the true matrix is N^{-norm_exp/2} times the stored
/// one, and word evaluation applies the accumulated power once at the end.
struct OperatorMatrix {
    int N = 0;
    Side side = Side::left;
    int norm_exp = 0;
    Rational q = 0;
    std::vector<OperatorEntry> e;
    std::string name;

    OperatorMatrix() = default;
    OperatorMatrix(int n, Side s, Rational qv)
        : N(n), side(s), q(std::move(qv)), e(static_cast<std::size_t>(n) * n) {}

    OperatorEntry& at(int i, int j) { return e[static_cast<std::size_t>(i - 1) * N + (j - 1)]; }
    const OperatorEntry& at(int i, int j) const {
        return e[static_cast<std::size_t>(i - 1) * N + (j - 1)];
    }

    int maxCreationsPerApply() const {
        int m = 0;
        for (const auto& entry : e) m = std::max(m, entry.maxCreations());
        return m;
    }
};

/// N x N matrix of Fock vectors (the bimodule element the matrices act on).
struct MatrixState {
    int N = 0;
    std::vector<FockVector> cells;

    MatrixState() = default;
    MatrixState(int n, int depth_cap)
        : N(n), cells(static_cast<std::size_t>(n) * n, FockVector(depth_cap)) {}

    FockVector& at(int i, int j) { return cells[static_cast<std::size_t>(i - 1) * N + (j - 1)]; }
    const FockVector& at(int i, int j) const {
        return cells[static_cast<std::size_t>(i - 1) * N + (j - 1)];
    }

    /// diag(Omega, ..., Omega).
    static MatrixState identityVacuum(int n, int depth_cap);

    void cellsSubtract(const MatrixState& o);

    bool operator==(const MatrixState& o) const;
};

/// Applies an operator matrix to a state:
///   left:  out(i,j) = sum_k entry(i,k)(state(k,j))
///   right: out(i,j) = sum_k entry(k,j)(state(i,k))
MatrixState act(const OperatorMatrix& m, const MatrixState& state);

/// The averaged vacuum projection: all diagonal cells become (1/N) times
/// the vacuum component of the trace of the state.
MatrixState apply_vacuum_projection(const MatrixState& state);

/// A word over the matrix algebra: operator matrices interleaved with the
/// vacuum projection.
struct VacuumProjectionAtom {};
using WordAtom = std::variant<OperatorMatrix, VacuumProjectionAtom>;
using MatrixWord = std::vector<WordAtom>;

/// Applies a word (rightmost atom first) to diag(Omega, ..., Omega).
MatrixState apply_word_to_identity(const MatrixWord& word);

/// Entrywise vacuum weight of a state (the expectation onto scalar
/// matrices), without normalization.
RationalMatrix expectation(const MatrixState& state);

/// Full expectation of a word: the scalar matrix scaled by
/// N^{-(sum of norm_exp)/2}.  A nonzero result with an odd exponent sum
/// signals an internal inconsistency and throws.
RationalMatrix word_expectation(const MatrixWord& word);

/// (1/N) trace of word_expectation.
Rational word_moment(const MatrixWord& word);

/// Variants of the creation/annihilation matrix models.
enum class Variant : std::uint8_t { plain, star, t, tstar };

/// The creation/annihilation matrix of colour k: entries are side-matching
/// Fock operators at labels h^k with the index pattern of the variant, and
/// norm_exp = 1 for the 1/sqrt(N) prefactor.
OperatorMatrix build_fock_matrix(Side side, Variant variant, int k, int N, Rational q);

/// A constant scalar matrix embedded as an operator matrix (norm_exp = 0).
OperatorMatrix constant_matrix(Side side, const RationalMatrix& values, Rational q = 0,
                               std::string name = {});

/// The Boolean model: the strictly upper-triangular annihilate/create
/// alternation of colour k, and the right shift matrix.
std::pair<OperatorMatrix, OperatorMatrix> build_boolean_matrices(int k, int N);

/// The monotone model at q = 0: the shifted s(h_0) matrix, the right shift
/// partner, and the diagonal s(h_1), ..., s(h_N) matrix.
struct MonotoneMatrices {
    OperatorMatrix t1;
    OperatorMatrix s1;
    OperatorMatrix t2;
};
MonotoneMatrices build_monotone_matrices(int N);

/// Product of matrix units E_{i_{s(1)}, j_{s(1)}} ... E_{i_{s(n)}, j_{s(n)}}
/// in the order of chi's permutation; the independent oracle for factorized
/// word evaluation.
RationalMatrix matrix_unit_word(const ChiMap& chi, const std::vector<int>& i,
                                const std::vector<int>& j, int N);

/// Parses the compact word grammar, e.g. "L1* R1 L2 C[a]".
/// Tokens: L<k>, R<k> with optional trailing '*' (creation/annihilation
/// matrices), Lt<k>, Rt<k> likewise for the transposed-label variants,
/// C[name] / Cr[name] for registered left/right constant matrices, and P0.
MatrixWord parse_matrix_word(const std::string& text, int N, const Rational& q,
                             const std::map<std::string, RationalMatrix>& constants);

/// One letter of a pure creation/annihilation matrix word.
struct FockLetter {
    Side side = Side::left;
    Variant variant = Variant::plain;
    int k = 1;

    std::string str() const;
};

/// Parses a word of L/R tokens only (no constants, no P0).
std::vector<FockLetter> parse_fock_letters(const std::string& text);

/// The matrix word of the letters at size N and deformation q.
MatrixWord fock_letter_word(const std::vector<FockLetter>& letters, int N, const Rational& q);

/// The size-limit of the letter word: the free (q = 0) vacuum expectation
/// of the corresponding creation/annihilation operators, with one label per
/// colour and a separate label per transposed colour.
Rational fock_letter_limit(const std::vector<FockLetter>& letters);

}  // namespace bifree
