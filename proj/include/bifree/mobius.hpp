#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "bifree/partition.hpp"
#include "bifree/rational.hpp"

namespace bifree {

/// Memo for bi-non-crossing Moebius values, keyed by (chi, pi, sigma).
/// Also caches the BNC lists and the refinement relation per chi, since the
/// interval recursion rescans them heavily.
///
/// Not internally synchronized: confine a cache to one worker, or fully
/// warm it first and share it read-only (lookups do not mutate).
class MobiusCache {
public:
    struct ChiTable {
        std::vector<SetPartition> parts;                 // BNC(chi), canonical order
        std::unordered_map<std::uint64_t, int> index;    // partition key -> position
        std::vector<std::vector<std::uint8_t>> leq;      // leq[a][b]: parts[a] <= parts[b]
    };

    const ChiTable& table(const ChiMap& chi);

    const Rational* find(std::uint64_t chiKey, std::uint64_t piKey, std::uint64_t sigmaKey) const;
    void put(std::uint64_t chiKey, std::uint64_t piKey, std::uint64_t sigmaKey, Rational value);

    std::size_t entries() const { return memo_.size(); }

private:
    struct TripleHash {
        std::size_t operator()(const std::array<std::uint64_t, 3>& k) const {
            std::uint64_t h = 1469598103934665603ull;
            for (auto v : k) {
                h ^= v;
                h *= 1099511628211ull;
            }
            return static_cast<std::size_t>(h);
        }
    };
    std::unordered_map<std::array<std::uint64_t, 3>, Rational, TripleHash> memo_;
    std::unordered_map<std::uint64_t, ChiTable> tables_;
};

/// Moebius function of the BNC(chi) lattice, by the memoized interval
/// recursion: value 0 when pi does not refine sigma, 1 on equality, and
/// otherwise the unique solution of sum_{pi <= tau <= sigma} mu(pi, tau) = 0.
/// Both partitions must be bi-non-crossing for chi.
Rational mobius_bnc(const SetPartition& pi, const SetPartition& sigma, const ChiMap& chi,
                    MobiusCache& cache);

/// All sigma in BNC(chi) with pi <= sigma <= eps.  pi must lie in BNC(chi);
/// eps may be any partition.
std::vector<SetPartition> interval_partitions(const SetPartition& pi, const SetPartition& eps,
                                              const ChiMap& chi, MobiusCache& cache);

/// The bracketed coefficient of the universal moment expansion:
/// sum of mu(pi, sigma) over sigma in BNC(chi) with pi <= sigma <= eps.
Rational interval_mobius_sum(const SetPartition& pi, const SetPartition& eps, const ChiMap& chi,
                             MobiusCache& cache);

}  // namespace bifree
