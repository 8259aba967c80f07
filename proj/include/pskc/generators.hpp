#ifndef PSKC_GENERATORS_HPP
#define PSKC_GENERATORS_HPP

#include <cmath>
#include <cstdint>

#include "pskc/common.hpp"
#include "pskc/rng.hpp"

namespace pskc {

// Ring-G layout, generator version 2: two concentric uniform annuli at
// the origin flanked by two Gaussian blobs.  The annuli are thick
// relative to their radii so each ring is a genuinely 2-D region.
//   class 0: blob at (-3.2, 0), sigma 0.12
//   class 1: blob at ( 3.2, 0), sigma 0.12
//   class 2: outer annulus, radius in [1.3, 2.3]
//   class 3: inner annulus, radius in [0.3, 0.6]
// noise_fraction adds that share of extra uniform points labeled -1.
inline LabeledDataset generate_ring_g(std::size_t n_per_cluster,
                                      double noise_fraction,
                                      std::uint64_t seed) {
    if (n_per_cluster < 50)
        throw invalid_parameter("ring-g: n_per_cluster must be >= 50");
    constexpr double kPi = 3.14159265358979323846;
    LabeledDataset out;
    out.data.d = 2;
    SplitMix64 rng(seed, 0x52494e47ULL);  // "RING"

    auto add = [&](double x, double y, int label) {
        out.data.coords.push_back(x);
        out.data.coords.push_back(y);
        ++out.data.n;
        out.truth.push_back(label);
    };

    const double blob_x[2] = {-3.2, 3.2};
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < n_per_cluster; ++i)
            add(blob_x[c] + 0.12 * rng.next_gaussian(),
                0.12 * rng.next_gaussian(), c);

    struct Annulus { double r_in, r_out; };
    const Annulus rings[2] = {{1.3, 2.3}, {0.3, 0.6}};
    for (int c = 0; c < 2; ++c) {
        auto [r_in, r_out] = rings[c];
        for (std::size_t i = 0; i < n_per_cluster; ++i) {
            // area-uniform radius within the annulus
            double r = std::sqrt(r_in * r_in +
                                 rng.next_double() * (r_out * r_out - r_in * r_in));
            double angle = 2.0 * kPi * rng.next_double();
            add(r * std::cos(angle), r * std::sin(angle), 2 + c);
        }
    }

    auto n_noise = static_cast<std::size_t>(
        std::floor(noise_fraction * 4.0 * static_cast<double>(n_per_cluster)));
    for (std::size_t i = 0; i < n_noise; ++i)
        add(-3.6 + 7.2 * rng.next_double(), -2.6 + 5.2 * rng.next_double(), -1);

    return out;
}

inline constexpr int ring_g_generator_version = 2;

// k isotropic Gaussian blobs with centres on a jittered unit grid.
inline LabeledDataset generate_gaussian_mixture(std::size_t k,
                                                std::size_t n_per_cluster,
                                                double spread,
                                                std::uint64_t seed) {
    if (k < 1) throw invalid_parameter("mixture: k must be >= 1");
    LabeledDataset out;
    out.data.d = 2;
    SplitMix64 rng(seed, 0x4d495854ULL);  // "MIXT"

    auto side = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(k))));
    for (std::size_t c = 0; c < k; ++c) {
        double cx = static_cast<double>(c % side) + 0.3 * (rng.next_double() - 0.5);
        double cy = static_cast<double>(c / side) + 0.3 * (rng.next_double() - 0.5);
        for (std::size_t i = 0; i < n_per_cluster; ++i) {
            out.data.coords.push_back(cx + spread * rng.next_gaussian());
            out.data.coords.push_back(cy + spread * rng.next_gaussian());
            ++out.data.n;
            out.truth.push_back(static_cast<int>(c));
        }
    }
    return out;
}

}  // namespace pskc

#endif
