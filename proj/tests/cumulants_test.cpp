#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bifree/cumulants.hpp"
#include "bifree/limits.hpp"
#include "bifree/rng.hpp"

using namespace bifree;

namespace {

Word mkWord(const std::string& sides, const std::vector<int>& vars,
            const std::vector<int>& colors = {}) {
    Word w;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        Letter l;
        l.side = sides[i] == 'l' ? Side::left : Side::right;
        l.var = vars.at(i);
        l.color = colors.empty() ? -1 : colors.at(i);
        w.letters.push_back(l);
    }
    return w;
}

/// Single-variable semicircular moments: Catalan numbers at even length.
MomentFunctional<Rational> semicircleFunctional() {
    MomentFunctional<Rational> f;
    f.eval = [](const Word& w) { return semicircle_moment(w.size()); };
    return f;
}

}  // namespace

TEST_CASE("phi_pi block products") {
    const auto f = semicircleFunctional();
    const Word w = mkWord("lll", {0, 0, 0});
    CHECK(phi_pi(SetPartition::full(3), w, f) == Rational(0));       // odd moment
    CHECK(phi_pi(SetPartition::singletons(3), w, f) == Rational(0));  // centred letters
    CHECK(phi_pi(SetPartition(3, {{1, 3}, {2}}), w, f) == Rational(0));
    const Word w4 = mkWord("llll", {0, 0, 0, 0});
    CHECK(phi_pi(SetPartition(4, {{1, 2}, {3, 4}}), w4, f) == Rational(1));
    CHECK(phi_pi(SetPartition::full(4), w4, f) == Rational(2));
}

TEST_CASE("kappa_pi small cases") {
    MobiusCache cache;
    const auto f = semicircleFunctional();
    // Single letter: the cumulant is the moment.
    CHECK(kappa_full(mkWord("l", {0}), f, cache) == Rational(0));
    // Pair: covariance form.
    CHECK(kappa_full(mkWord("lr", {0, 0}), f, cache) == Rational(1));
    // The fourth free cumulant of the semicircle vanishes.
    CHECK(kappa_full(mkWord("llll", {0, 0, 0, 0}), f, cache) == Rational(0));
    // Arbitrary functional, n = 2: kappa = f(z1 z2) - f(z1) f(z2).
    MomentFunctional<Rational> g;
    g.eval = [](const Word& w) {
        if (w.letters.empty()) return Rational(1);
        Rational v(1);
        for (const auto& l : w.letters) v *= Rational(l.var + 2, 3);
        return v + Rational(w.size(), 5);
    };
    const Word w2 = mkWord("ll", {0, 1});
    const Rational expect = g(w2) - g(mkWord("l", {0})) * g(mkWord("l", {1}));
    CHECK(kappa_full(w2, g, cache) == expect);
    // Non-bi-non-crossing partition is rejected.
    CHECK_THROWS(kappa_pi(SetPartition(4, {{1, 3}, {2, 4}}), mkWord("llll", {0, 0, 0, 0}), f,
                          cache));
}

TEST_CASE("moment reversion recovers simple models") {
    MobiusCache cache;
    // Only the second-order cumulant is nonzero: pair-partition count.
    auto pairOnly = [](const Word& w) {
        return w.size() == 2 ? Rational(1) : Rational(0);
    };
    CHECK(moment_from_cumulants<Rational>(mkWord("llll", {0, 0, 0, 0}), pairOnly, cache) ==
          Rational(2));
    CHECK(moment_from_cumulants<Rational>(mkWord("llllll", {0, 0, 0, 0, 0, 0}), pairOnly,
                                          cache) == Rational(5));
    // Poisson-type cumulants over a two-sided word.
    auto poisson = [](const Word& w) {
        Rational v(1, 2);
        (void)w;
        return v;
    };
    CHECK(moment_from_cumulants<Rational>(mkWord("lr", {0, 1}), poisson, cache) ==
          Rational(3, 4));
}

TEST_CASE("universal expansion collapses for single-colour words") {
    MobiusCache cache;
    MomentFunctional<Rational> g;
    g.eval = [](const Word& w) {
        if (w.letters.empty()) return Rational(1);
        Rational v(1);
        for (const auto& l : w.letters) v *= Rational(2 * l.var - 1, 2);
        return v - Rational(static_cast<int>(w.size() % 3), 7);
    };
    for (const std::string sides : {"ll", "lrl", "rrlr"}) {
        std::vector<int> vars(sides.size()), colors(sides.size(), 1);
        for (std::size_t i = 0; i < sides.size(); ++i) vars[i] = static_cast<int>(i % 2);
        const Word w = mkWord(sides, vars, colors);
        CHECK(bifreeness_residual<Rational>(w, g, cache).isZero());
    }
}

TEST_CASE("universal expansion detects classical independence at n = 2") {
    MobiusCache cache;
    // Two tensor-independent variables: f factors over colours.
    MomentFunctional<Rational> g;
    g.eval = [](const Word& w) {
        Rational a(1), b(1);
        int ca = 0, cb = 0;
        for (const auto& l : w.letters) {
            if (l.color == 1) {
                a *= Rational(2);
                ++ca;
            } else {
                b *= Rational(3);
                ++cb;
            }
        }
        return (ca ? a : Rational(1)) * (cb ? b : Rational(1));
    };
    const Word w = mkWord("ll", {0, 1}, {1, 2});
    CHECK(universal_moment_rhs(w, g, cache) ==
          g(mkWord("l", {0}, {1})) * g(mkWord("l", {1}, {2})));
}

TEST_CASE("clt moments from a covariance") {
    const CovarianceSpec cov = CovarianceSpec::pair(1.0, 0.5, 1.0);
    cov.validate();
    CHECK(clt_moment<double>(ChiMap::parse("lr"), cov, {0, 1}) == doctest::Approx(0.5));
    CHECK(clt_moment<double>(ChiMap::parse("lrl"), cov, {0, 1, 0}) == 0.0);
    CHECK(clt_moment<double>(ChiMap::parse("llrr"), cov, {0, 0, 1, 1}) == doctest::Approx(1.25));
    CHECK(clt_moment<double>(ChiMap::parse("lrlr"), cov, {0, 1, 0, 1}) == doctest::Approx(1.25));
    // Side mismatch rejected.
    CHECK_THROWS(clt_moment<double>(ChiMap::parse("ll"), cov, {0, 1}));

    // All-left unit variance gives Catalan numbers.
    CovarianceSpec one;
    one.labels = {{"x", Side::left, 0}};
    one.matrix = Eigen::MatrixXd::Ones(1, 1);
    for (int m = 1; m <= 4; ++m) {
        ChiMap chi = ChiMap::allLeft(2 * m);
        std::vector<int> assign(2 * m, 0);
        CHECK(clt_moment<double>(chi, one, assign) == doctest::Approx(double(catalan(m))));
    }
}

TEST_CASE("clt moment is symmetric under covariance-preserving relabelling") {
    CovarianceSpec cov;
    cov.labels = {{"a", Side::left, 0}, {"b", Side::left, 0}, {"c", Side::right, 0}};
    cov.matrix.resize(3, 3);
    cov.matrix << 1.0, 0.3, 0.2, 0.3, 1.0, 0.4, 0.2, 0.4, 1.0;
    cov.validate();
    // Swapping the two left labels and permuting the matrix accordingly
    // leaves every moment unchanged.
    CovarianceSpec swapped = cov;
    std::swap(swapped.labels[0], swapped.labels[1]);
    Eigen::PermutationMatrix<3> P;
    P.indices() << 1, 0, 2;
    swapped.matrix = P.transpose() * cov.matrix * P;
    SplitMix64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + 2 * static_cast<int>(rng.next() % 2);
        std::vector<Side> tags(n);
        std::vector<int> assign(n), assignSwapped(n);
        for (int i = 0; i < n; ++i) {
            const int pick = static_cast<int>(rng.next() % 3);
            tags[i] = cov.labels[pick].side;
            assign[i] = pick;
            assignSwapped[i] = pick == 0 ? 1 : pick == 1 ? 0 : 2;
        }
        const ChiMap chi{tags};
        CHECK(clt_moment<double>(chi, cov, assign) ==
              doctest::Approx(clt_moment<double>(chi, swapped, assignSwapped)));
    }
}

TEST_CASE("clt cumulants vanish beyond order two") {
    MobiusCache cache;
    const CovarianceSpec cov = CovarianceSpec::pair(1.0, 0.5, 1.0);
    MomentFunctional<double> f;
    f.eval = [&cov](const Word& w) {
        if (w.letters.empty()) return 1.0;
        std::vector<int> assign;
        for (const auto& l : w.letters) assign.push_back(l.var);
        return clt_moment<double>(w.chi(), cov, assign);
    };
    SplitMix64 rng(11);
    for (int n : {1, 3, 4}) {
        for (int trial = 0; trial < 8; ++trial) {
            Word w;
            for (int i = 0; i < n; ++i) {
                const int var = static_cast<int>(rng.next() % 2);
                w.letters.push_back({var, cov.labels[var].side, -1});
            }
            const double kappa = kappa_full(w, f, cache);
            if (n == 1) {
                CHECK(kappa == 0.0);
            } else {
                CHECK(std::abs(kappa) < 1e-12);
            }
        }
    }
}

TEST_CASE("bi-poisson cumulants") {
    CHECK(bi_poisson_cumulant<Rational>(ChiMap::parse("lll"), Rational(1, 2), Rational(2),
                                        Rational(3)) == Rational(4));
    CHECK(bi_poisson_cumulant<Rational>(ChiMap::parse("lrr"), Rational(1, 2), Rational(2),
                                        Rational(3)) == Rational(9));
    CHECK(bi_poisson_cumulant<Rational>(ChiMap::parse("lr"), Rational(0), Rational(2),
                                        Rational(3)) == Rational(0));
    CHECK(bi_poisson_cumulant<double>(ChiMap::parse("ll"), 0.5, 0.0, 3.0) == 0.0);
}

TEST_CASE("exact round trip on random rational data") {
    MobiusCache cache;
    SplitMix64 rng(2718);
    // Alphabet: two left, two right variables; moments on words to length 4.
    const int maxLen = 4;
    std::unordered_map<std::uint64_t, Rational> table;
    std::function<std::uint64_t(const Word&)> keyOf = [](const Word& w) {
        std::uint64_t k = 1;
        for (const auto& l : w.letters) k = k * 4 + static_cast<std::uint64_t>(l.var);
        return k;
    };
    std::vector<Word> words;
    std::function<void(Word&, int)> gen = [&](Word& w, int len) {
        if (w.size() > 0) words.push_back(w);
        if (len == maxLen) return;
        for (int v = 0; v < 4; ++v) {
            w.letters.push_back({v, v < 2 ? Side::left : Side::right, -1});
            gen(w, len + 1);
            w.letters.pop_back();
        }
    };
    Word root;
    gen(root, 0);
    for (const auto& w : words)
        table.emplace(keyOf(w), Rational(static_cast<int>(rng.next() % 9) - 4,
                                         1 + static_cast<int>(rng.next() % 2)));
    MomentFunctional<Rational> f;
    f.eval = [&](const Word& w) {
        return w.letters.empty() ? Rational(1) : table.at(keyOf(w));
    };
    std::unordered_map<std::uint64_t, Rational> kappa;
    for (const auto& w : words) kappa.emplace(keyOf(w), kappa_full(w, f, cache));
    auto kappaFn = [&](const Word& w) { return kappa.at(keyOf(w)); };
    for (const auto& w : words)
        CHECK(moment_from_cumulants<Rational>(w, kappaFn, cache) == f(w));
}

TEST_CASE("covariance validation") {
    CovarianceSpec bad = CovarianceSpec::pair(1.0, 2.0, 1.0);  // indefinite
    CHECK_THROWS(bad.validate());
    CovarianceSpec asym = CovarianceSpec::pair(1.0, 0.0, 1.0);
    asym.matrix(0, 1) = 0.5;
    CHECK_THROWS(asym.validate());
}
