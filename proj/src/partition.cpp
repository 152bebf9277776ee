#include "bifree/partition.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace bifree {

ChiMap ChiMap::parse(const std::string& s) {
    std::vector<Side> t;
    t.reserve(s.size());
    for (char c : s) {
        if (c == 'l' || c == 'L') {
            t.push_back(Side::left);
        } else if (c == 'r' || c == 'R') {
            t.push_back(Side::right);
        } else if (c == ' ') {
            continue;
        } else {
            throw std::invalid_argument("chi string must use only 'l' and 'r'");
        }
    }
    if (t.empty()) throw std::invalid_argument("chi must be nonempty");
    return ChiMap(std::move(t));
}

std::string ChiMap::str() const {
    std::string s;
    s.reserve(tags.size());
    for (Side t : tags) s.push_back(t == Side::left ? 'l' : 'r');
    return s;
}

std::vector<int> ChiMap::sChi() const {
    std::vector<int> out;
    out.reserve(tags.size());
    const int n = size();
    for (int i = 1; i <= n; ++i)
        if (tags[i - 1] == Side::left) out.push_back(i);
    for (int i = n; i >= 1; --i)
        if (tags[i - 1] == Side::right) out.push_back(i);
    return out;
}

std::vector<int> ChiMap::sChiInv() const {
    const auto s = sChi();
    std::vector<int> inv(s.size());
    for (int k = 1; k <= static_cast<int>(s.size()); ++k) inv[s[k - 1] - 1] = k;
    return inv;
}

std::uint32_t ChiMap::mask() const {
    std::uint32_t m = 0;
    for (int i = 0; i < size(); ++i)
        if (tags[i] == Side::right) m |= (1u << i);
    return m;
}

SetPartition::SetPartition(int n, const std::vector<std::vector<int>>& blocks) {
    if (n < 0) throw std::invalid_argument("partition size must be nonnegative");
    std::vector<int> blockOf(n, -1);
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        if (blocks[bi].empty()) throw std::invalid_argument("partition blocks must be nonempty");
        for (int x : blocks[bi]) {
            if (x < 1 || x > n) throw std::invalid_argument("block element out of range");
            if (blockOf[x - 1] != -1) throw std::invalid_argument("blocks must be disjoint");
            blockOf[x - 1] = static_cast<int>(bi);
        }
    }
    for (int i = 0; i < n; ++i)
        if (blockOf[i] == -1) throw std::invalid_argument("blocks must cover {1..n}");

    rgs_.assign(n, 0);
    std::vector<int> renumber(blocks.size(), -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        int b = blockOf[i];
        if (renumber[b] == -1) renumber[b] = next++;
        rgs_[i] = static_cast<std::uint8_t>(renumber[b]);
    }
}

SetPartition SetPartition::fromRgs(std::vector<std::uint8_t> rgs) {
    SetPartition p;
    p.rgs_ = std::move(rgs);
    return p;
}

SetPartition SetPartition::singletons(int n) {
    std::vector<std::uint8_t> r(n);
    for (int i = 0; i < n; ++i) r[i] = static_cast<std::uint8_t>(i);
    return fromRgs(std::move(r));
}

SetPartition SetPartition::full(int n) {
    return fromRgs(std::vector<std::uint8_t>(n, 0));
}

int SetPartition::blockCount() const {
    int m = -1;
    for (auto v : rgs_) m = std::max(m, static_cast<int>(v));
    return m + 1;
}

std::vector<std::vector<int>> SetPartition::blocks() const {
    std::vector<std::vector<int>> out(blockCount());
    for (int i = 0; i < size(); ++i) out[rgs_[i]].push_back(i + 1);
    return out;
}

bool SetPartition::isPairPartition() const {
    std::vector<int> cnt(blockCount(), 0);
    for (auto v : rgs_) ++cnt[v];
    for (int c : cnt)
        if (c != 2) return false;
    return true;
}

bool SetPartition::refines(const SetPartition& coarser) const {
    if (size() != coarser.size()) throw std::invalid_argument("refines: size mismatch");
    std::vector<int> image(blockCount(), -1);
    for (int i = 0; i < size(); ++i) {
        int b = rgs_[i];
        int c = coarser.rgs_[i];
        if (image[b] == -1) {
            image[b] = c;
        } else if (image[b] != c) {
            return false;
        }
    }
    return true;
}

SetPartition SetPartition::relabel(const std::vector<int>& perm) const {
    const int n = size();
    if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("relabel: size mismatch");
    std::vector<std::uint8_t> byElement(n);
    for (int i = 0; i < n; ++i) byElement[perm[i] - 1] = rgs_[i];
    std::vector<int> renumber(n, -1);
    std::vector<std::uint8_t> out(n);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        int b = byElement[i];
        if (renumber[b] == -1) renumber[b] = next++;
        out[i] = static_cast<std::uint8_t>(renumber[b]);
    }
    return fromRgs(std::move(out));
}

SetPartition SetPartition::restrictTo(const std::vector<int>& subset) const {
    if (subset.empty()) throw std::invalid_argument("restrictTo: subset must be nonempty");
    std::vector<std::uint8_t> out(subset.size());
    std::vector<int> renumber(blockCount(), -1);
    int next = 0;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        int x = subset[i];
        if (x < 1 || x > size()) throw std::invalid_argument("restrictTo: element out of range");
        int b = rgs_[x - 1];
        if (renumber[b] == -1) renumber[b] = next++;
        out[i] = static_cast<std::uint8_t>(renumber[b]);
    }
    return fromRgs(std::move(out));
}

std::uint64_t SetPartition::key() const {
    std::uint64_t k = static_cast<std::uint64_t>(size());
    for (int i = 0; i < size(); ++i) k = (k << 4) | rgs_[i];
    return k;
}

std::string SetPartition::json() const {
    std::string s = "[";
    const auto bs = blocks();
    for (std::size_t b = 0; b < bs.size(); ++b) {
        if (b) s += ",";
        s += "[";
        for (std::size_t i = 0; i < bs[b].size(); ++i) {
            if (i) s += ",";
            s += std::to_string(bs[b][i]);
        }
        s += "]";
    }
    s += "]";
    return s;
}

SetPartition SetPartition::parseJson(const std::string& text, int n) {
    std::vector<std::vector<int>> blocks;
    std::vector<int> cur;
    int value = -1;
    int depth = 0;
    auto flushValue = [&] {
        if (value >= 0) {
            cur.push_back(value);
            value = -1;
        }
    };
    for (char c : text) {
        if (c == '[') {
            ++depth;
            if (depth == 2) cur.clear();
        } else if (c == ']') {
            flushValue();
            if (depth == 2) blocks.push_back(cur);
            --depth;
        } else if (c >= '0' && c <= '9') {
            value = (value < 0 ? 0 : value * 10) + (c - '0');
        } else if (c == ',' || c == ' ') {
            flushValue();
        } else {
            throw std::invalid_argument("bad partition literal");
        }
    }
    return SetPartition(n, blocks);
}

bool is_non_crossing(const SetPartition& pi) {
    // Scan with a stack of open blocks; a block may only close from the top,
    // and re-entering a block that is open but buried means a crossing.
    const int n = pi.size();
    if (n == 0) return true;
    std::vector<int> last(pi.blockCount(), 0);
    for (int i = 0; i < n; ++i) last[pi.rgs()[i]] = i;
    std::vector<int> stack;
    for (int i = 0; i < n; ++i) {
        int b = pi.rgs()[i];
        if (stack.empty() || stack.back() != b) {
            if (std::find(stack.begin(), stack.end(), b) != stack.end()) return false;
            stack.push_back(b);
        }
        if (last[b] == i) {
            if (stack.back() != b) return false;
            stack.pop_back();
        }
    }
    return stack.empty();
}

bool is_bi_non_crossing(const SetPartition& pi, const ChiMap& chi) {
    if (pi.size() != chi.size())
        throw std::invalid_argument("is_bi_non_crossing: partition/chi length mismatch");
    return is_non_crossing(pi.relabel(chi.sChiInv()));
}

namespace {

// First-block gap decomposition: the block containing the first element
// splits the remaining elements into segments partitioned independently.
void ncEnum(const std::vector<int>& elems, std::vector<std::uint8_t>& rgs, int nextBlock,
            const std::function<void(int)>& done);

void ncEnumGaps(const std::vector<std::vector<int>>& gaps, std::size_t gi,
                std::vector<std::uint8_t>& rgs, int nextBlock,
                const std::function<void(int)>& done) {
    if (gi == gaps.size()) {
        done(nextBlock);
        return;
    }
    ncEnum(gaps[gi], rgs, nextBlock, [&](int nb) { ncEnumGaps(gaps, gi + 1, rgs, nb, done); });
}

void ncEnum(const std::vector<int>& elems, std::vector<std::uint8_t>& rgs, int nextBlock,
            const std::function<void(int)>& done) {
    if (elems.empty()) {
        done(nextBlock);
        return;
    }
    const int m = static_cast<int>(elems.size());
    const int myBlock = nextBlock;
    rgs[elems[0] - 1] = static_cast<std::uint8_t>(myBlock);
    std::vector<int> chosen;  // indices into elems of further block members
    std::function<void(int)> choose = [&](int from) {
        std::vector<std::vector<int>> gaps;
        int prev = 0;
        for (int c : chosen) {
            gaps.emplace_back(elems.begin() + prev + 1, elems.begin() + c);
            prev = c;
        }
        gaps.emplace_back(elems.begin() + prev + 1, elems.end());
        ncEnumGaps(gaps, 0, rgs, nextBlock + 1, done);
        for (int i = from; i < m; ++i) {
            chosen.push_back(i);
            rgs[elems[i] - 1] = static_cast<std::uint8_t>(myBlock);
            choose(i + 1);
            chosen.pop_back();
        }
    };
    choose(1);
}

// Pair partitions only: the first element pairs at an odd offset.
void ncPairEnum(const std::vector<int>& elems, std::vector<std::uint8_t>& rgs, int nextBlock,
                const std::function<void(int)>& done) {
    if (elems.empty()) {
        done(nextBlock);
        return;
    }
    const int m = static_cast<int>(elems.size());
    for (int i = 1; i < m; i += 2) {
        rgs[elems[0] - 1] = static_cast<std::uint8_t>(nextBlock);
        rgs[elems[i] - 1] = static_cast<std::uint8_t>(nextBlock);
        std::vector<int> inside(elems.begin() + 1, elems.begin() + i);
        std::vector<int> after(elems.begin() + i + 1, elems.end());
        ncPairEnum(inside, rgs, nextBlock + 1,
                   [&](int nb) { ncPairEnum(after, rgs, nb, done); });
    }
}

}  // namespace

std::vector<SetPartition> enumerate_nc(int n, bool pairs_only) {
    if (n < 1) throw std::invalid_argument("enumerate_nc: n must be positive");
    if (n > kEnumerationCap)
        throw std::invalid_argument("enumerate_nc: n exceeds the enumeration cap (14)");
    std::vector<SetPartition> out;
    std::vector<std::uint8_t> rgs(n, 0);
    std::vector<int> elems(n);
    for (int i = 0; i < n; ++i) elems[i] = i + 1;
    auto capture = [&](int) { out.push_back(SetPartition::fromRgs(rgs)); };
    if (pairs_only) {
        if (n % 2 == 0) ncPairEnum(elems, rgs, 0, capture);
    } else {
        ncEnum(elems, rgs, 0, capture);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<SetPartition> enumerate_bnc(const ChiMap& chi, bool pairs_only) {
    const int n = chi.size();
    if (n > kEnumerationCap)
        throw std::invalid_argument("enumerate_bnc: chi exceeds the enumeration cap (14)");
    const auto s = chi.sChi();
    auto nc = enumerate_nc(n, pairs_only);
    std::vector<SetPartition> out;
    out.reserve(nc.size());
    for (const auto& tau : nc) out.push_back(tau.relabel(s));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace bifree
