#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifree/mobius.hpp"
#include "bifree/partition.hpp"
#include "bifree/rational.hpp"

namespace bifree {

/// One position of a word: a variable id, the side it acts on, and an
/// optional colour (-1 when uncoloured).
struct Letter {
    int var = 0;
    Side side = Side::left;
    int color = -1;

    bool operator==(const Letter& o) const {
        return var == o.var && side == o.side && color == o.color;
    }
};

/// A word of variables; chi is derived from the sides, the epsilon
/// partition from the colours.
struct Word {
    std::vector<Letter> letters;

    int size() const { return static_cast<int>(letters.size()); }

    ChiMap chi() const {
        std::vector<Side> t;
        t.reserve(letters.size());
        for (const auto& l : letters) t.push_back(l.side);
        return ChiMap(std::move(t));
    }

    /// Partition of positions by colour.
    SetPartition epsilon() const {
        const int n = size();
        std::vector<std::uint8_t> rgs(n);
        std::vector<int> seen;
        for (int i = 0; i < n; ++i) {
            int c = letters[i].color;
            int idx = -1;
            for (std::size_t s = 0; s < seen.size(); ++s)
                if (seen[s] == c) idx = static_cast<int>(s);
            if (idx == -1) {
                idx = static_cast<int>(seen.size());
                seen.push_back(c);
            }
            rgs[i] = static_cast<std::uint8_t>(idx);
        }
        return SetPartition::fromRgs(std::move(rgs));
    }

    /// Subword at 1-based positions (in the given order).
    Word sub(const std::vector<int>& positions) const {
        Word w;
        w.letters.reserve(positions.size());
        for (int p : positions) w.letters.push_back(letters[p - 1]);
        return w;
    }

    std::string str() const {
        std::string s;
        for (const auto& l : letters) {
            if (!s.empty()) s += ' ';
            s += (l.side == Side::left ? 'l' : 'r');
            s += std::to_string(l.var);
        }
        return s;
    }
};

template <class S>
inline S scalar_cast(const Rational& r) {
    return S(r);
}
template <>
inline double scalar_cast<double>(const Rational& r) {
    return r.toDouble();
}

/// A unital linear functional presented by its values on words.
/// Evaluation of the empty word must be 1.
template <class S>
struct MomentFunctional {
    std::function<S(const Word&)> eval;

    S operator()(const Word& w) const { return eval(w); }
};

/// Block-ordered product of moments: the product over blocks of f on the
/// subword of the block, each block read in increasing position order.
template <class S>
S phi_pi(const SetPartition& pi, const Word& word, const MomentFunctional<S>& f) {
    if (pi.size() != word.size()) throw std::invalid_argument("phi_pi: size mismatch");
    S out = scalar_cast<S>(Rational(1));
    for (const auto& block : pi.blocks()) out = out * f(word.sub(block));
    return out;
}

/// The Moebius-weighted cumulant at pi: the sum over bi-non-crossing
/// refinements sigma <= pi of phi_sigma mu(sigma, pi).  pi must be
/// bi-non-crossing for the word's chi.
template <class S>
S kappa_pi(const SetPartition& pi, const Word& word, const MomentFunctional<S>& f,
           MobiusCache& cache) {
    const ChiMap chi = word.chi();
    if (!is_bi_non_crossing(pi, chi))
        throw std::invalid_argument("kappa_pi: pi must be bi-non-crossing for the word");
    const auto& t = cache.table(chi);
    S acc = scalar_cast<S>(Rational(0));
    for (const auto& sigma : t.parts) {
        if (!sigma.refines(pi)) continue;
        Rational mu = mobius_bnc(sigma, pi, chi, cache);
        if (mu.isZero()) continue;
        acc = acc + phi_pi(sigma, word, f) * scalar_cast<S>(mu);
    }
    return acc;
}

/// Full cumulant (at the one-block partition).
template <class S>
S kappa_full(const Word& word, const MomentFunctional<S>& f, MobiusCache& cache) {
    return kappa_pi(SetPartition::full(word.size()), word, f, cache);
}

/// Moment reversion: the sum over pi in BNC(chi) of the product over blocks
/// of the supplied cumulant function evaluated on the block subword.
template <class S>
S moment_from_cumulants(const Word& word, const std::function<S(const Word&)>& cumulant_fn,
                        MobiusCache& cache) {
    const ChiMap chi = word.chi();
    const auto& t = cache.table(chi);
    S acc = scalar_cast<S>(Rational(0));
    for (const auto& pi : t.parts) {
        S prod = scalar_cast<S>(Rational(1));
        for (const auto& block : pi.blocks()) prod = prod * cumulant_fn(word.sub(block));
        acc = acc + prod;
    }
    return acc;
}

/// Right-hand side of the universal moment expansion for a coloured word:
/// sum over pi in BNC(chi) of the interval Moebius coefficient against the
/// colour partition, times phi_pi.
template <class S>
S universal_moment_rhs(const Word& word, const MomentFunctional<S>& f, MobiusCache& cache) {
    const ChiMap chi = word.chi();
    const SetPartition eps = word.epsilon();
    const auto& t = cache.table(chi);
    S acc = scalar_cast<S>(Rational(0));
    for (const auto& pi : t.parts) {
        if (!pi.refines(eps)) continue;
        Rational coeff = interval_mobius_sum(pi, eps, chi, cache);
        if (coeff.isZero()) continue;
        acc = acc + phi_pi(pi, word, f) * scalar_cast<S>(coeff);
    }
    return acc;
}

/// f(word) minus the universal expansion; identically zero exactly when the
/// coloured families are bi-free.
template <class S>
S bifreeness_residual(const Word& word, const MomentFunctional<S>& f, MobiusCache& cache) {
    return f(word) - universal_moment_rhs(word, f, cache);
}

/// Index labels with side tags and their real covariance matrix.
struct CovarianceSpec {
    struct LabelInfo {
        std::string name;
        Side side = Side::left;
        int color = 0;
    };
    std::vector<LabelInfo> labels;
    Eigen::MatrixXd matrix;

    int find(const std::string& name) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i].name == name) return static_cast<int>(i);
        throw std::invalid_argument("unknown covariance label: " + name);
    }

    /// Symmetry and positive semidefiniteness within a float tolerance.
    void validate(double tol = 1e-9) const {
        const auto n = matrix.rows();
        if (matrix.cols() != n || static_cast<std::size_t>(n) != labels.size())
            throw std::invalid_argument("covariance: shape mismatch");
        if (!matrix.isApprox(matrix.transpose(), tol))
            throw std::invalid_argument("covariance: matrix must be symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix);
        const double floor = -tol * std::max(1.0, matrix.cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < floor)
            throw std::invalid_argument("covariance: matrix must be positive semidefinite");
    }

    /// The standard two-label spec [[c_ll, c_lr], [c_lr, c_rr]].
    static CovarianceSpec pair(double c_ll, double c_lr, double c_rr) {
        CovarianceSpec s;
        s.labels = {{"l", Side::left, 0}, {"r", Side::right, 0}};
        s.matrix.resize(2, 2);
        s.matrix << c_ll, c_lr, c_lr, c_rr;
        return s;
    }
};

/// Central-limit moment: the sum over bi-non-crossing pair partitions of
/// the product of covariance entries at the paired labels.  Exactly zero
/// for odd length, without enumeration.
template <class S = double>
S clt_moment(const ChiMap& chi, const CovarianceSpec& cov, const std::vector<int>& assignment) {
    const int n = chi.size();
    if (static_cast<int>(assignment.size()) != n)
        throw std::invalid_argument("clt_moment: assignment length mismatch");
    for (int p = 0; p < n; ++p) {
        const auto& info = cov.labels.at(assignment[p]);
        if (info.side != chi.tags[p])
            throw std::invalid_argument("clt_moment: label side does not match chi at position " +
                                        std::to_string(p + 1));
    }
    if (n % 2 != 0) return S(0);
    S acc(0);
    for (const auto& pi : enumerate_bnc(chi, true)) {
        S prod(1);
        for (const auto& block : pi.blocks())
            prod = prod * S(cov.matrix(assignment[block[0] - 1], assignment[block[1] - 1]));
        acc = acc + prod;
    }
    return acc;
}

/// Cumulant of the bi-free Poisson law: lambda alpha^{#left} beta^{#right}.
template <class S = double>
S bi_poisson_cumulant(const ChiMap& chi, const S& lambda, const S& alpha, const S& beta) {
    S out = lambda;
    for (Side t : chi.tags) out = out * (t == Side::left ? alpha : beta);
    return out;
}

}  // namespace bifree
