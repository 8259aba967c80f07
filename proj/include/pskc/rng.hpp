#ifndef PSKC_RNG_HPP
#define PSKC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace pskc {

// Counter-based splitmix64 stream. std::mt19937_64 with the standard
// distributions is not bit-reproducible across library implementations,
// which breaks the determinism contract, so draws are produced here
// directly from integer arithmetic.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    // Combine a base seed with a stream index (e.g. partitioning block).
    SplitMix64(std::uint64_t seed, std::uint64_t stream)
        : SplitMix64(mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Unbiased-enough bounded draw (multiply-shift); deterministic everywhere.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    double next_double() {  // uniform in [0,1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (polar form avoided to keep the
    // draw count per call fixed).
    double next_gaussian() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

// k indices sampled uniformly without replacement from [0, n) by a
// partial Fisher-Yates shuffle.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                           std::size_t k,
                                                           SplitMix64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t pick = j + static_cast<std::size_t>(rng.next_below(n - j));
        std::swap(idx[j], idx[pick]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace pskc

#endif
