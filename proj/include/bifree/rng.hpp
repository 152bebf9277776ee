#pragma once

#include <cmath>
#include <cstdint>

namespace bifree {

/// SplitMix64 stream.  Substreams for parallel chunks are derived from
/// (seed, chunk) as documented in substream(); Gaussian variates come from
/// the Box-Muller transform on (0,1] uniforms.  Both choices are fixed so
/// runs are reproducible for a given seed regardless of worker count.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : s_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1]: (n + 1) / 2^64 over the top 53 bits' grid.
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
    }

    /// Standard normal via Box-Muller; generates pairs and caches one.
    double gaussian() {
        if (haveSpare_) {
            haveSpare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        haveSpare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t s_;
    double spare_ = 0.0;
    bool haveSpare_ = false;
};

/// Substream derivation: the initial state is the SplitMix64 mix of
/// seed xor (golden-ratio constant times (chunk + 1)).
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t chunk) {
    SplitMix64 mixer(seed ^ (0x9e3779b97f4a7c15ull * (chunk + 1)));
    return SplitMix64(mixer.next());
}

}  // namespace bifree
