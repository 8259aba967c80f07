#ifndef PSKC_KERNEL_HPP
#define PSKC_KERNEL_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pskc/common.hpp"
#include "pskc/parallel.hpp"
#include "pskc/rng.hpp"

namespace pskc {

struct KernelParams {
    std::size_t psi = 32;       // subsample size per partitioning
    std::size_t t = 100;        // number of partitionings
    std::int64_t rng_seed = 42;

    void validate(std::size_t n) const {
        if (psi < 2) throw invalid_parameter("psi must be >= 2");
        if (psi > n) throw invalid_parameter("psi must be <= n");
        if (t < 1) throw invalid_parameter("t must be >= 1");
    }
};

/// One cell index per partitioning; the exact one-hot-per-block feature
/// map stored compactly.
using FeatureIndexVector = std::vector<std::uint32_t>;

// t Voronoi partitionings of psi sampled centres each. Immutable once
// built; centre coordinates are copied out of the training data so the
// model can outlive it.
class PartitioningModel {
public:
    PartitioningModel() = default;

    static PartitioningModel build(const Dataset& data, const KernelParams& params) {
        data.validate();
        params.validate(data.n);
        PartitioningModel m;
        m.psi_ = params.psi;
        m.t_ = params.t;
        m.d_ = data.d;
        m.seed_ = params.rng_seed;
        m.centres_.reserve(m.t_ * m.psi_ * m.d_);
        for (std::size_t block = 0; block < m.t_; ++block) {
            SplitMix64 rng(static_cast<std::uint64_t>(params.rng_seed), block);
            auto picks = sample_without_replacement(data.n, m.psi_, rng);
            for (std::size_t idx : picks) {
                auto p = data.point(idx);
                m.centres_.insert(m.centres_.end(), p.begin(), p.end());
            }
        }
        return m;
    }

    // Model with explicitly given centres (t * psi * d, row-major).
    static PartitioningModel from_centres(std::vector<double> centres,
                                          std::size_t t, std::size_t psi,
                                          std::size_t d,
                                          std::int64_t seed = 0) {
        if (centres.size() != t * psi * d)
            throw invalid_input("from_centres: centre count does not match t*psi*d");
        PartitioningModel m;
        m.centres_ = std::move(centres);
        m.psi_ = psi;
        m.t_ = t;
        m.d_ = d;
        m.seed_ = seed;
        return m;
    }

    std::size_t psi() const { return psi_; }
    std::size_t t() const { return t_; }
    std::size_t dim() const { return d_; }
    std::int64_t seed() const { return seed_; }

    const double* centre(std::size_t block, std::size_t j) const {
        return centres_.data() + (block * psi_ + j) * d_;
    }

    // Index of the nearest centre in `block` under l2; ties go to the
    // lowest centre index.
    std::uint32_t cell_index(std::size_t block, std::span<const double> x) const {
        check_point(x);
        const double* base = centres_.data() + block * psi_ * d_;
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_j = 0;
        for (std::size_t j = 0; j < psi_; ++j) {
            double dist = sq_dist(x, base + j * d_);
            if (dist < best) {
                best = dist;
                best_j = static_cast<std::uint32_t>(j);
            }
        }
        return best_j;
    }

    FeatureIndexVector embed(std::span<const double> x) const {
        check_point(x);
        FeatureIndexVector cells(t_);
        for (std::size_t i = 0; i < t_; ++i)
            cells[i] = cell_index(i, x);
        return cells;
    }

    // kappa(x,y) = (1/t) |{i : same cell in block i}|
    double kappa(std::span<const double> x, std::span<const double> y) const {
        check_point(x);
        check_point(y);
        std::size_t matches = 0;
        for (std::size_t i = 0; i < t_; ++i)
            if (cell_index(i, x) == cell_index(i, y)) ++matches;
        return static_cast<double>(matches) / static_cast<double>(t_);
    }

    static double kappa(const FeatureIndexVector& a, const FeatureIndexVector& b) {
        if (a.size() != b.size())
            throw invalid_input("kappa: block-count mismatch");
        std::size_t matches = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] == b[i]) ++matches;
        return static_cast<double>(matches) / static_cast<double>(a.size());
    }

    // File layout: magic, version, d, psi, t, seed as little-endian u64,
    // then centre coordinates row-major as little-endian binary64.
    void save(const std::string& path) const {
        static_assert(std::endian::native == std::endian::little,
                      "model files are little-endian");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw io_error("cannot open model file for writing: " + path);
        out.write(kMagic, 8);
        write_u64(out, kVersion);
        write_u64(out, d_);
        write_u64(out, psi_);
        write_u64(out, t_);
        write_u64(out, static_cast<std::uint64_t>(seed_));
        out.write(reinterpret_cast<const char*>(centres_.data()),
                  static_cast<std::streamsize>(centres_.size() * sizeof(double)));
        if (!out) throw io_error("write failed: " + path);
    }

    static PartitioningModel load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw io_error("cannot open model file: " + path);
        char magic[8];
        in.read(magic, 8);
        if (!in || std::memcmp(magic, kMagic, 8) != 0)
            throw io_error("not a model file: " + path);
        if (read_u64(in) != kVersion)
            throw io_error("unsupported model version: " + path);
        PartitioningModel m;
        m.d_ = read_u64(in);
        m.psi_ = read_u64(in);
        m.t_ = read_u64(in);
        m.seed_ = static_cast<std::int64_t>(read_u64(in));
        m.centres_.resize(m.t_ * m.psi_ * m.d_);
        in.read(reinterpret_cast<char*>(m.centres_.data()),
                static_cast<std::streamsize>(m.centres_.size() * sizeof(double)));
        if (!in) throw io_error("truncated model file: " + path);
        return m;
    }

    bool operator==(const PartitioningModel& o) const {
        return psi_ == o.psi_ && t_ == o.t_ && d_ == o.d_ && seed_ == o.seed_ &&
               centres_ == o.centres_;
    }

private:
    static constexpr char kMagic[9] = "PSKCMDL\n";
    static constexpr std::uint64_t kVersion = 1;

    static void write_u64(std::ofstream& out, std::uint64_t v) {
        char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(buf, 8);
    }
    static std::uint64_t read_u64(std::ifstream& in) {
        unsigned char buf[8];
        in.read(reinterpret_cast<char*>(buf), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return v;
    }

    void check_point(std::span<const double> x) const {
        if (x.size() != d_)
            throw invalid_input("point dimension does not match model");
    }

    std::vector<double> centres_;  // t * psi * d, row-major
    std::size_t psi_ = 0;
    std::size_t t_ = 0;
    std::size_t d_ = 0;
    std::int64_t seed_ = 0;
};

// All points of a dataset embedded once; n x t cell indices.
inline std::vector<FeatureIndexVector> embed_all(const PartitioningModel& model,
                                                 const Dataset& data) {
    std::vector<FeatureIndexVector> out(data.n);
    parallel_chunks(data.n, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            out[i] = model.embed(data.point(i));
    });
    return out;
}

}  // namespace pskc

#endif
