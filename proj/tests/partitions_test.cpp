#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>

#include "bifree/limits.hpp"
#include "bifree/mobius.hpp"
#include "bifree/partition.hpp"
#include "bifree/rng.hpp"

using namespace bifree;

namespace {

// Brute-force oracle: every partition of {1..n} via assignment vectors.
std::vector<SetPartition> allPartitions(int n) {
    std::vector<SetPartition> out;
    std::vector<std::uint8_t> rgs(n, 0);
    std::function<void(int, int)> rec = [&](int i, int maxUsed) {
        if (i == n) {
            out.push_back(SetPartition::fromRgs(rgs));
            return;
        }
        for (int b = 0; b <= maxUsed + 1 && b < 16; ++b) {
            rgs[i] = static_cast<std::uint8_t>(b);
            rec(i + 1, std::max(maxUsed, b));
        }
    };
    rec(0, -1);
    return out;
}

// Quartic-scan crossing oracle.
bool crossingOracle(const SetPartition& p) {
    const int n = p.size();
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            for (int c = b + 1; c <= n; ++c)
                for (int d = c + 1; d <= n; ++d)
                    if (p.sameBlock(a, c) && p.sameBlock(b, d) && !p.sameBlock(a, b)) return true;
    return false;
}

ChiMap paperChi() {
    // left positions {2,3,6}, right positions {1,4,5}
    return ChiMap::parse("rllrrl");
}

}  // namespace

TEST_CASE("rational arithmetic is exact and guarded") {
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(-4, 8) == Rational(-1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational::parse("7/3").str() == "7/3");
    CHECK(Rational::parse("-5").toDouble() == -5.0);
    CHECK(Rational(1, 2).pow(0) == Rational(1));
    CHECK(Rational(0).pow(0) == Rational(1));
    CHECK(Rational(-1, 2).pow(3) == Rational(-1, 8));
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
    const Rational big(INT64_MAX / 2, 1);
    CHECK_THROWS_AS(big * Rational(5), std::overflow_error);
}

TEST_CASE("s_chi reads left positions ascending then right positions descending") {
    CHECK(paperChi().sChi() == std::vector<int>{2, 3, 6, 5, 4, 1});
    CHECK(ChiMap::parse("lll").sChi() == std::vector<int>{1, 2, 3});
    CHECK(ChiMap::parse("rrr").sChi() == std::vector<int>{3, 2, 1});
    const auto inv = paperChi().sChiInv();
    const auto s = paperChi().sChi();
    for (int k = 1; k <= 6; ++k) CHECK(inv[s[k - 1] - 1] == k);
}

TEST_CASE("bi-non-crossing detection") {
    const SetPartition pi(6, {{1, 4}, {2, 5}, {3, 6}});
    CHECK(is_bi_non_crossing(pi, paperChi()));
    CHECK_FALSE(is_non_crossing(pi));

    CHECK_FALSE(is_bi_non_crossing(SetPartition(4, {{1, 3}, {2, 4}}), ChiMap::parse("llll")));
    for (int n = 1; n <= 5; ++n) {
        CHECK(is_bi_non_crossing(SetPartition::singletons(n), ChiMap::parse(std::string(n, 'l'))));
        CHECK(is_bi_non_crossing(SetPartition::singletons(n), ChiMap::parse(std::string(n, 'r'))));
    }
    CHECK_THROWS(is_bi_non_crossing(SetPartition::full(3), ChiMap::parse("llll")));
}

TEST_CASE("non-crossing test agrees with the quartic oracle") {
    for (int n = 1; n <= 7; ++n)
        for (const auto& p : allPartitions(n)) CHECK(is_non_crossing(p) == !crossingOracle(p));
}

TEST_CASE("canonical form round trips") {
    const SetPartition p(6, {{6, 3}, {1, 4}, {5, 2}});
    CHECK(p == SetPartition(6, {{1, 4}, {2, 5}, {3, 6}}));
    CHECK(p.json() == "[[1,4],[2,5],[3,6]]");
    CHECK(SetPartition::parseJson(p.json(), 6) == p);
    CHECK_THROWS(SetPartition(3, {{1, 2}}));          // not a cover
    CHECK_THROWS(SetPartition(3, {{1, 2}, {2, 3}}));  // overlap
}

TEST_CASE("enumeration counts: full is Catalan, brute force confirms membership") {
    for (int n = 1; n <= 7; ++n) {
        const auto everything = allPartitions(n);
        SplitMix64 rng(99 + n);
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<Side> tags(n);
            for (int i = 0; i < n; ++i)
                tags[i] = (rng.next() & 1) ? Side::right : Side::left;
            const ChiMap chi{tags};
            const auto bnc = enumerate_bnc(chi, false);
            CHECK(static_cast<std::int64_t>(bnc.size()) == catalan(n));
            // Against the brute-force filter of all partitions.
            std::vector<SetPartition> filtered;
            for (const auto& p : everything)
                if (is_bi_non_crossing(p, chi)) filtered.push_back(p);
            std::sort(filtered.begin(), filtered.end());
            CHECK(bnc == filtered);
        }
    }
}

TEST_CASE("spec anchors for small enumerations") {
    CHECK(allPartitions(3).size() == 5);
    CHECK(enumerate_bnc(ChiMap::parse("lll")).size() == 5);
    CHECK(allPartitions(4).size() == 15);
    CHECK(enumerate_bnc(ChiMap::parse("lrrl")).size() == 14);

    const auto pairs = enumerate_bnc(ChiMap::parse("llrr"), true);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == SetPartition(4, {{1, 2}, {3, 4}}));
    CHECK(pairs[1] == SetPartition(4, {{1, 3}, {2, 4}}));
}

TEST_CASE("enumeration cap") {
    CHECK_THROWS(enumerate_bnc(ChiMap::allLeft(15)));
}

TEST_CASE("restriction") {
    const SetPartition p(6, {{1, 4}, {2, 5}, {3, 6}});
    CHECK(p.restrictTo({1, 2, 3}) == SetPartition::singletons(3));
    std::vector<int> all{1, 2, 3, 4, 5, 6};
    CHECK(p.restrictTo(all) == p);
    CHECK(SetPartition(4, {{1, 2}, {3, 4}}).restrictTo({2, 3, 4}) ==
          SetPartition(3, {{1}, {2, 3}}));
    CHECK_THROWS(p.restrictTo({}));
}

TEST_CASE("mobius values on small intervals") {
    MobiusCache cache;
    const ChiMap chi2 = ChiMap::parse("lr");
    CHECK(mobius_bnc(SetPartition::full(2), SetPartition::full(2), chi2, cache) == Rational(1));
    CHECK(mobius_bnc(SetPartition::singletons(2), SetPartition::full(2), chi2, cache) ==
          Rational(-1));
    // Not a refinement: zero.
    const ChiMap chi3 = ChiMap::parse("lll");
    CHECK(mobius_bnc(SetPartition(3, {{1, 2}, {3}}), SetPartition(3, {{1}, {2, 3}}), chi3,
                     cache) == Rational(0));
    // Full interval at n=4 for every chi.
    for (const std::string s : {"llll", "lrlr", "rrll", "rrrr"}) {
        const ChiMap chi = ChiMap::parse(s);
        CHECK(mobius_bnc(SetPartition::singletons(4), SetPartition::full(4), chi, cache) ==
              Rational(-5));
    }
    CHECK_THROWS(mobius_bnc(SetPartition(4, {{1, 3}, {2, 4}}), SetPartition::full(4),
                            ChiMap::parse("llll"), cache));
}

TEST_CASE("mobius matches the non-crossing Moebius through the chi permutation") {
    MobiusCache cache;
    SplitMix64 rng(7);
    for (int n = 2; n <= 5; ++n) {
        const ChiMap flat = ChiMap::allLeft(n);
        for (int trial = 0; trial < 4; ++trial) {
            std::vector<Side> tags(n);
            for (int i = 0; i < n; ++i) tags[i] = (rng.next() & 1) ? Side::right : Side::left;
            const ChiMap chi{tags};
            const auto s = chi.sChi();
            const auto& t = cache.table(chi);
            for (const auto& pi : t.parts)
                for (const auto& sigma : t.parts) {
                    if (!pi.refines(sigma)) continue;
                    const auto inv = chi.sChiInv();
                    CHECK(mobius_bnc(pi, sigma, chi, cache) ==
                          mobius_bnc(pi.relabel(inv), sigma.relabel(inv), flat, cache));
                }
        }
    }
}

TEST_CASE("lattice-isomorphism invariance across chi maps") {
    MobiusCache cache;
    SplitMix64 rng(41);
    for (int n = 2; n <= 5; ++n) {
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<Side> ta(n), tb(n);
            for (int i = 0; i < n; ++i) {
                ta[i] = (rng.next() & 1) ? Side::right : Side::left;
                tb[i] = (rng.next() & 1) ? Side::right : Side::left;
            }
            const ChiMap a{ta}, b{tb};
            // Conjugation: relabel through s_b after the inverse of s_a.
            const auto invA = a.sChiInv();
            const auto sb = b.sChi();
            std::vector<int> conj(n);
            for (int x = 1; x <= n; ++x) conj[x - 1] = sb[invA[x - 1] - 1];
            const auto& t = cache.table(a);
            for (const auto& pi : t.parts)
                for (const auto& sigma : t.parts) {
                    if (!pi.refines(sigma)) continue;
                    CHECK(mobius_bnc(pi, sigma, a, cache) ==
                          mobius_bnc(pi.relabel(conj), sigma.relabel(conj), b, cache));
                }
        }
    }
}

TEST_CASE("interval partitions") {
    MobiusCache cache;
    const ChiMap chi = ChiMap::parse("lll");
    const SetPartition eps(3, {{1, 3}, {2}});
    const auto interval = interval_partitions(SetPartition::singletons(3), eps, chi, cache);
    REQUIRE(interval.size() == 2);
    CHECK(std::count(interval.begin(), interval.end(), SetPartition::singletons(3)) == 1);
    CHECK(std::count(interval.begin(), interval.end(), eps) == 1);

    const auto whole =
        interval_partitions(SetPartition::singletons(3), SetPartition::full(3), chi, cache);
    CHECK(whole.size() == 5);
    const auto self = interval_partitions(eps, eps, chi, cache);
    REQUIRE(self.size() == 1);
    CHECK(self[0] == eps);
}

TEST_CASE("mobius factorizes across a separating point") {
    MobiusCache cache;
    SplitMix64 rng(23);
    // sigma = sigma1 u sigma2 with sigma1 on {1..x}, sigma2 on {x+1..n}:
    // mu(pi, sigma) factors over the two halves.
    for (int trial = 0; trial < 40; ++trial) {
        const int x = 2 + static_cast<int>(rng.next() % 2);   // split point
        const int n2 = 2 + static_cast<int>(rng.next() % 2);  // right size
        const int n = x + n2;
        std::vector<Side> tags(n);
        for (int i = 0; i < n; ++i) tags[i] = (rng.next() & 1) ? Side::right : Side::left;
        const ChiMap chi{tags};
        std::vector<int> leftIdx, rightIdx;
        for (int i = 1; i <= x; ++i) leftIdx.push_back(i);
        for (int i = x + 1; i <= n; ++i) rightIdx.push_back(i);
        const ChiMap chiL{std::vector<Side>(tags.begin(), tags.begin() + x)};
        const ChiMap chiR{std::vector<Side>(tags.begin() + x, tags.end())};
        const auto& t = cache.table(chi);
        for (const auto& sigma : t.parts) {
            // Split sigma if no block crosses the cut.
            bool splits = true;
            for (const auto& block : sigma.blocks()) {
                const bool lo = block.front() <= x, hi = block.back() > x;
                if (lo && hi) splits = false;
            }
            if (!splits) continue;
            for (const auto& pi : t.parts) {
                if (!pi.refines(sigma)) continue;
                const Rational whole = mobius_bnc(pi, sigma, chi, cache);
                const Rational parts =
                    mobius_bnc(pi.restrictTo(leftIdx), sigma.restrictTo(leftIdx), chiL, cache) *
                    mobius_bnc(pi.restrictTo(rightIdx), sigma.restrictTo(rightIdx), chiR, cache);
                CHECK(whole == parts);
            }
        }
    }
}
