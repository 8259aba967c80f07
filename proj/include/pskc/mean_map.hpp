#ifndef PSKC_MEAN_MAP_HPP
#define PSKC_MEAN_MAP_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pskc/common.hpp"
#include "pskc/kernel.hpp"

namespace pskc {

// Kernel mean map of a point set: the average of the members' one-hot
// feature maps. Internally kept as integer cell counts plus the member
// count, so adds and removals are exact and block sums are exactly 1.
class MeanMap {
public:
    MeanMap(std::size_t t, std::size_t psi)
        : counts_(t * psi, 0), t_(t), psi_(psi) {}

    static MeanMap of(const PartitioningModel& model,
                      std::span<const FeatureIndexVector> members) {
        if (members.empty())
            throw invalid_input("mean map of an empty member set");
        MeanMap m(model.t(), model.psi());
        for (const auto& e : members) m.add_member(e);
        return m;
    }

    void add_member(const FeatureIndexVector& embedding) {
        check(embedding);
        for (std::size_t i = 0; i < t_; ++i)
            ++counts_[i * psi_ + embedding[i]];
        ++member_count_;
    }

    void add_members(std::span<const FeatureIndexVector> embeddings) {
        for (const auto& e : embeddings) add_member(e);
    }

    void remove_member(const FeatureIndexVector& embedding) {
        check(embedding);
        if (member_count_ == 0)
            throw invalid_input("remove from an empty mean map");
        for (std::size_t i = 0; i < t_; ++i) {
            auto& c = counts_[i * psi_ + embedding[i]];
            if (c == 0) throw invalid_input("removing a non-member embedding");
            --c;
        }
        --member_count_;
    }

    std::uint64_t member_count() const { return member_count_; }
    std::size_t t() const { return t_; }
    std::size_t psi() const { return psi_; }

    double weight(std::size_t block, std::size_t cell) const {
        return static_cast<double>(counts_[block * psi_ + cell]) /
               static_cast<double>(member_count_);
    }

    std::vector<double> weights() const {
        std::vector<double> w(counts_.size());
        for (std::size_t i = 0; i < counts_.size(); ++i)
            w[i] = static_cast<double>(counts_[i]) / static_cast<double>(member_count_);
        return w;
    }

    // K-hat(x, G) = <Phi(x), Phi-hat(G)> / t. The 1/t factor carries the
    // implicit 1/sqrt(t) block scaling so values live in [0,1] and a
    // singleton has self-similarity 1.
    double similarity(const FeatureIndexVector& x_embed) const {
        check(x_embed);
        if (member_count_ == 0)
            throw invalid_input("similarity against an empty mean map");
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < t_; ++i)
            sum += counts_[i * psi_ + x_embed[i]];
        return static_cast<double>(sum) /
               (static_cast<double>(t_) * static_cast<double>(member_count_));
    }

    bool operator==(const MeanMap& o) const {
        return t_ == o.t_ && psi_ == o.psi_ && member_count_ == o.member_count_ &&
               counts_ == o.counts_;
    }

private:
    void check(const FeatureIndexVector& e) const {
        if (e.size() != t_)
            throw invalid_input("embedding block count does not match mean map");
    }

    std::vector<std::uint32_t> counts_;  // t blocks of psi cell counts
    std::uint64_t member_count_ = 0;
    std::size_t t_;
    std::size_t psi_;
};

inline double psk_similarity(const FeatureIndexVector& x_embed, const MeanMap& map) {
    return map.similarity(x_embed);
}

struct SimilarityProfile {
    std::vector<double> values;       // max over clusters of K-hat(x, G^j)
    std::vector<int> argmax_cluster;  // ties to the lowest cluster id
};

inline SimilarityProfile similarity_profile(
    std::span<const FeatureIndexVector> points,
    std::span<const MeanMap> clusters) {
    if (clusters.empty())
        throw invalid_input("similarity profile needs at least one cluster");
    SimilarityProfile prof;
    prof.values.reserve(points.size());
    prof.argmax_cluster.reserve(points.size());
    for (const auto& e : points) {
        double best = -1.0;
        int best_j = 0;
        for (std::size_t j = 0; j < clusters.size(); ++j) {
            double s = clusters[j].similarity(e);
            if (s > best) {
                best = s;
                best_j = static_cast<int>(j);
            }
        }
        prof.values.push_back(best);
        prof.argmax_cluster.push_back(best_j);
    }
    return prof;
}

}  // namespace pskc

#endif
