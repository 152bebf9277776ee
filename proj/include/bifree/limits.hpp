#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bifree/rational.hpp"

namespace bifree {

/// Exact Catalan number; guarded at m <= 30.
std::int64_t catalan(int m);

/// Standard semicircular moment: catalan(m/2) for even m, 0 for odd.
Rational semicircle_moment(int m);

/// A word in the Boolean model: colour sequence and matrix size.
struct BooleanWordSpec {
    std::vector<int> colors;
    int N = 0;
};

/// The finite-size closed form of the Boolean model:
/// (2/N) max{0, floor((N-n+1)/2)} when n is even and adjacent colours match
/// in pairs, 0 otherwise.  The count is the number of odd diagonal indices
/// x <= N-n; flooring (N-n)/2 instead undercounts by one when N-n is odd.
Rational boolean_closed_form(const std::vector<int>& colors, int N);

/// Exact trace value of the alternating word, evaluated through the matrix
/// engine and cross-checked against the closed form; a mismatch throws.
Rational boolean_word_value(const BooleanWordSpec& spec);

/// The limit of the Boolean word: Bernoulli moments over maximal
/// same-colour runs (1 iff even length with adjacent colours paired).
Rational boolean_limit(const std::vector<int>& colors);

/// Alternating-exponent pattern z2^{m1} z1^{k1} z2^{m2} ... z1^{kn} z2^{m_{n+1}}.
struct MonotonePattern {
    std::vector<int> m;  // n+1 outer exponents, each >= 0
    std::vector<int> k;  // n inner exponents, each >= 1

    int kSum() const {
        int s = 0;
        for (int v : k) s += v;
        return s;
    }
    int degree() const {
        int s = kSum();
        for (int v : m) s += v;
        return s;
    }
    /// Parses "s2^1 s1^2 s2^1" style strings.
    static MonotonePattern parse(const std::string& text);
    std::string str() const;
};

/// Limit of the monotone word: the semicircular moment of the total inner
/// exponent times the product of semicircular moments of the outer ones.
Rational monotone_limit(const MonotonePattern& p);

/// Exact trace value of the monotone word at size N, evaluated through the
/// matrix engine and cross-checked against ((N - sum k)/N) * limit; a
/// mismatch throws.
Rational monotone_word_value(const MonotonePattern& p, int N);

}  // namespace bifree
