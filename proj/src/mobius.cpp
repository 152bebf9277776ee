#include "bifree/mobius.hpp"

#include <array>
#include <stdexcept>

namespace bifree {

namespace {

std::uint64_t chiKeyOf(const ChiMap& chi) {
    return (static_cast<std::uint64_t>(chi.size()) << 32) | chi.mask();
}

}  // namespace

const MobiusCache::ChiTable& MobiusCache::table(const ChiMap& chi) {
    const std::uint64_t key = chiKeyOf(chi);
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;

    ChiTable t;
    t.parts = enumerate_bnc(chi, false);
    const int m = static_cast<int>(t.parts.size());
    t.index.reserve(m * 2);
    for (int i = 0; i < m; ++i) t.index.emplace(t.parts[i].key(), i);
    t.leq.assign(m, std::vector<std::uint8_t>(m, 0));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) t.leq[a][b] = t.parts[a].refines(t.parts[b]) ? 1 : 0;
    return tables_.emplace(key, std::move(t)).first->second;
}

const Rational* MobiusCache::find(std::uint64_t chiKey, std::uint64_t piKey,
                                  std::uint64_t sigmaKey) const {
    auto it = memo_.find({chiKey, piKey, sigmaKey});
    return it == memo_.end() ? nullptr : &it->second;
}

void MobiusCache::put(std::uint64_t chiKey, std::uint64_t piKey, std::uint64_t sigmaKey,
                      Rational value) {
    memo_.emplace(std::array<std::uint64_t, 3>{chiKey, piKey, sigmaKey}, std::move(value));
}

namespace {

Rational mobiusByIndex(int pi, int sigma, const MobiusCache::ChiTable& t, std::uint64_t chiKey,
                       MobiusCache& cache) {
    if (!t.leq[pi][sigma]) return Rational(0);
    if (pi == sigma) return Rational(1);
    if (const Rational* hit = cache.find(chiKey, t.parts[pi].key(), t.parts[sigma].key()))
        return *hit;
    // Second defining recursion: the sum of mu(pi, tau) over the interval
    // [pi, sigma] vanishes, so the top value is minus the partial sum.
    Rational acc(0);
    const int m = static_cast<int>(t.parts.size());
    for (int tau = 0; tau < m; ++tau) {
        if (tau == sigma) continue;
        if (t.leq[pi][tau] && t.leq[tau][sigma]) acc += mobiusByIndex(pi, tau, t, chiKey, cache);
    }
    Rational value = -acc;
    cache.put(chiKey, t.parts[pi].key(), t.parts[sigma].key(), value);
    return value;
}

}  // namespace

Rational mobius_bnc(const SetPartition& pi, const SetPartition& sigma, const ChiMap& chi,
                    MobiusCache& cache) {
    if (pi.size() != chi.size() || sigma.size() != chi.size())
        throw std::invalid_argument("mobius_bnc: size mismatch");
    if (!is_bi_non_crossing(pi, chi) || !is_bi_non_crossing(sigma, chi))
        throw std::invalid_argument("mobius_bnc: arguments must be bi-non-crossing for chi");
    if (!pi.refines(sigma)) return Rational(0);
    const auto& t = cache.table(chi);
    const int a = t.index.at(pi.key());
    const int b = t.index.at(sigma.key());
    return mobiusByIndex(a, b, t, chiKeyOf(chi), cache);
}

std::vector<SetPartition> interval_partitions(const SetPartition& pi, const SetPartition& eps,
                                              const ChiMap& chi, MobiusCache& cache) {
    if (pi.size() != chi.size() || eps.size() != chi.size())
        throw std::invalid_argument("interval_partitions: size mismatch");
    if (!is_bi_non_crossing(pi, chi))
        throw std::invalid_argument("interval_partitions: pi must be bi-non-crossing");
    const auto& t = cache.table(chi);
    std::vector<SetPartition> out;
    for (const auto& sigma : t.parts)
        if (pi.refines(sigma) && sigma.refines(eps)) out.push_back(sigma);
    return out;
}

Rational interval_mobius_sum(const SetPartition& pi, const SetPartition& eps, const ChiMap& chi,
                             MobiusCache& cache) {
    if (!pi.refines(eps)) return Rational(0);
    const auto& t = cache.table(chi);
    const int a = t.index.at(pi.key());
    const std::uint64_t ck = chiKeyOf(chi);
    Rational acc(0);
    const int m = static_cast<int>(t.parts.size());
    for (int s = 0; s < m; ++s)
        if (t.leq[a][s] && t.parts[s].refines(eps)) acc += mobiusByIndex(a, s, t, ck, cache);
    return acc;
}

}  // namespace bifree
