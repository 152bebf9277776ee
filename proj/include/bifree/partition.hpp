#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bifree {

enum class Side : std::uint8_t { left, right };

/// Per-position left/right tags of a word, plus the induced permutation
/// that reads left positions in increasing order followed by right
/// positions in decreasing order.
struct ChiMap {
    std::vector<Side> tags;

    ChiMap() = default;
    explicit ChiMap(std::vector<Side> t) : tags(std::move(t)) {}

    int size() const { return static_cast<int>(tags.size()); }
    Side at(int pos1) const { return tags[pos1 - 1]; }

    /// Parses a string over {l, r}, e.g. "rllrrl".
    static ChiMap parse(const std::string& s);
    static ChiMap allLeft(int n) { return ChiMap(std::vector<Side>(n, Side::left)); }
    static ChiMap allRight(int n) { return ChiMap(std::vector<Side>(n, Side::right)); }

    std::string str() const;

    /// 1-based images (s(1), ..., s(n)).
    std::vector<int> sChi() const;
    std::vector<int> sChiInv() const;

    /// Bitmask key (bit i set when position i+1 is a right tag), for memo keys.
    std::uint32_t mask() const;

    bool operator==(const ChiMap& o) const { return tags == o.tags; }
};

/// A partition of {1, ..., n} in canonical form.
///
/// Internally a restricted-growth string: element i (0-based) maps to the
/// index of its block, blocks numbered by order of first appearance.  That
/// form is unique, so equality of partitions is equality of representation.
/// blocks() renders the canonical block list (each block ascending, blocks
/// ordered by least element).
class SetPartition {
public:
    SetPartition() = default;
    /// From explicit blocks over {1, ..., n}; validates disjoint cover.
    SetPartition(int n, const std::vector<std::vector<int>>& blocks);

    static SetPartition fromRgs(std::vector<std::uint8_t> rgs);
    static SetPartition singletons(int n);
    static SetPartition full(int n);

    int size() const { return static_cast<int>(rgs_.size()); }
    int blockCount() const;
    const std::vector<std::uint8_t>& rgs() const { return rgs_; }

    std::vector<std::vector<int>> blocks() const;
    bool sameBlock(int a, int b) const { return rgs_[a - 1] == rgs_[b - 1]; }
    bool isPairPartition() const;

    /// this <= coarser in the refinement order.
    bool refines(const SetPartition& coarser) const;

    /// Image partition under a bijection of {1, ..., n}: element x goes to perm[x-1].
    SetPartition relabel(const std::vector<int>& perm) const;

    /// Restriction to an ordered subset, retained elements relabelled to
    /// {1, ..., |subset|} preserving order; empty intersections dropped.
    SetPartition restrictTo(const std::vector<int>& subset) const;

    /// Packed canonical key (n <= 15): 4 bits per element plus the length.
    std::uint64_t key() const;

    std::string json() const;
    static SetPartition parseJson(const std::string& text, int n);

    bool operator==(const SetPartition& o) const { return rgs_ == o.rgs_; }
    bool operator!=(const SetPartition& o) const { return rgs_ != o.rgs_; }
    bool operator<(const SetPartition& o) const { return rgs_ < o.rgs_; }

private:
    std::vector<std::uint8_t> rgs_;
};

/// Crossing test in the standard order: a < b < c < d, a~c, b~d, a!~b.
bool is_non_crossing(const SetPartition& pi);

/// pi is bi-non-crossing for chi when the relabelling of pi by the inverse
/// of chi's permutation is non-crossing.  Throws on length mismatch.
bool is_bi_non_crossing(const SetPartition& pi, const ChiMap& chi);

/// All non-crossing partitions of {1, ..., n}, canonically ordered.
std::vector<SetPartition> enumerate_nc(int n, bool pairs_only = false);

/// BNC(chi), generated by pushing non-crossing partitions forward through
/// the chi permutation (never by filtering all partitions).  Canonical
/// order; pairs_only keeps partitions with all blocks of size two.
/// Throws when chi is longer than the enumeration cap (14).
std::vector<SetPartition> enumerate_bnc(const ChiMap& chi, bool pairs_only = false);

inline constexpr int kEnumerationCap = 14;

}  // namespace bifree
