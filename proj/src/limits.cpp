#include "bifree/limits.hpp"

#include <sstream>
#include <stdexcept>

#include "bifree/bimatrix.hpp"

namespace bifree {

std::int64_t catalan(int m) {
    if (m < 0) throw std::invalid_argument("catalan: m must be nonnegative");
    if (m > 30) throw std::invalid_argument("catalan: m exceeds the overflow guard (30)");
    // C_0 = 1, C_{k+1} = C_k * 2(2k+1)/(k+2); exact at every step.
    std::int64_t c = 1;
    for (int k = 0; k < m; ++k) {
        __int128 next = static_cast<__int128>(c) * 2 * (2 * k + 1);
        next /= (k + 2);
        c = static_cast<std::int64_t>(next);
    }
    return c;
}

Rational semicircle_moment(int m) {
    if (m < 0) throw std::invalid_argument("semicircle_moment: negative order");
    if (m % 2 != 0) return Rational(0);
    return Rational(catalan(m / 2));
}

Rational boolean_closed_form(const std::vector<int>& colors, int N) {
    const int n = static_cast<int>(colors.size());
    if (n % 2 != 0) return Rational(0);
    for (int m = 1; 2 * m <= n; ++m)
        if (colors[2 * m - 2] != colors[2 * m - 1]) return Rational(0);
    const int count = std::max(0, (N - n + 1) / 2);
    return Rational(2 * count, N);
}

Rational boolean_word_value(const BooleanWordSpec& spec) {
    if (spec.colors.empty()) throw std::invalid_argument("boolean word: empty colour sequence");
    if (spec.N < 2) throw std::invalid_argument("boolean word: N must be at least 2");
    MatrixWord word;
    OperatorMatrix shiftR;
    bool haveShift = false;
    for (int c : spec.colors) {
        auto [t, s] = build_boolean_matrices(c, spec.N);
        if (!haveShift) {
            shiftR = s;
            haveShift = true;
        }
        word.emplace_back(std::move(t));
        word.emplace_back(shiftR);
    }
    // The model's state carries the factor 2/N rather than 1/N.
    const Rational direct = word_moment(word) * Rational(2);
    const Rational closed = boolean_closed_form(spec.colors, spec.N);
    if (direct != closed)
        throw std::logic_error("boolean word: direct evaluation " + direct.str() +
                               " disagrees with closed form " + closed.str());
    return direct;
}

Rational boolean_limit(const std::vector<int>& colors) {
    // Boolean factorization over maximal same-colour runs; each run
    // contributes a Bernoulli moment (1 for even length, 0 for odd).
    std::size_t i = 0;
    while (i < colors.size()) {
        std::size_t j = i;
        while (j < colors.size() && colors[j] == colors[i]) ++j;
        if ((j - i) % 2 != 0) return Rational(0);
        i = j;
    }
    return Rational(1);
}

MonotonePattern MonotonePattern::parse(const std::string& text) {
    MonotonePattern p;
    std::istringstream in(text);
    std::string tok;
    std::vector<std::pair<int, int>> parts;  // (variable, exponent)
    while (in >> tok) {
        int var = 0;
        int exp = 1;
        std::size_t caret = tok.find('^');
        std::string head = tok.substr(0, caret);
        if (head == "s1")
            var = 1;
        else if (head == "s2")
            var = 2;
        else
            throw std::invalid_argument("bad pattern token: " + tok);
        if (caret != std::string::npos) exp = std::stoi(tok.substr(caret + 1));
        if (exp < 0) throw std::invalid_argument("bad exponent in pattern: " + tok);
        parts.emplace_back(var, exp);
    }
    if (parts.empty()) throw std::invalid_argument("empty monotone pattern");
    // Normalize into m1 k1 m2 ... kn m_{n+1} with zero outer exponents
    // inserted where the pattern starts/ends with s1 or repeats.
    p.m.push_back(0);
    for (const auto& [var, exp] : parts) {
        if (var == 2) {
            p.m.back() += exp;
        } else {
            if (exp == 0) continue;
            p.k.push_back(exp);
            p.m.push_back(0);
        }
    }
    return p;
}

std::string MonotonePattern::str() const {
    std::string s;
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] > 0) {
            if (!s.empty()) s += ' ';
            s += "s2^" + std::to_string(m[j]);
        }
        if (j < k.size()) {
            if (!s.empty()) s += ' ';
            s += "s1^" + std::to_string(k[j]);
        }
    }
    if (s.empty()) s = "s2^0";
    return s;
}

Rational monotone_limit(const MonotonePattern& p) {
    Rational out = semicircle_moment(p.kSum());
    for (int mj : p.m) out *= semicircle_moment(mj);
    return out;
}

Rational monotone_word_value(const MonotonePattern& p, int N) {
    if (p.m.size() != p.k.size() + 1)
        throw std::invalid_argument("monotone pattern: needs n+1 outer exponents");
    for (int kj : p.k)
        if (kj < 1) throw std::invalid_argument("monotone pattern: inner exponents must be >= 1");
    if (N < 2) throw std::invalid_argument("monotone word: N must be at least 2");

    auto mats = build_monotone_matrices(N);
    MatrixWord word;
    auto pushPower = [&word](const OperatorMatrix& a, int e) {
        for (int t = 0; t < e; ++t) word.emplace_back(a);
    };
    for (std::size_t j = 0; j < p.m.size(); ++j) {
        pushPower(mats.t2, p.m[j]);
        if (j < p.k.size()) {
            for (int t = 0; t < p.k[j]; ++t) {
                word.emplace_back(mats.t1);
                word.emplace_back(mats.s1);
            }
        }
    }
    const Rational direct = word.empty() ? Rational(1) : word_moment(word);
    const int ks = p.kSum();
    const Rational expected =
        (N > ks) ? Rational(N - ks, N) * monotone_limit(p) : Rational(0);
    if (direct != expected)
        throw std::logic_error("monotone word: direct evaluation " + direct.str() +
                               " disagrees with the diagonal closed form " + expected.str());
    return direct;
}

}  // namespace bifree
