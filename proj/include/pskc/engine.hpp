#ifndef PSKC_ENGINE_HPP
#define PSKC_ENGINE_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "pskc/common.hpp"
#include "pskc/kernel.hpp"
#include "pskc/mean_map.hpp"
#include "pskc/parallel.hpp"

namespace pskc {

struct PskcParams {
    double tau = 0.1;   // final similarity threshold
    double rho = 0.1;   // growth rate of the decaying admission threshold
    KernelParams kernel;

    void validate() const {
        if (!(tau > 0.0 && tau < 1.0))
            throw invalid_parameter("tau must be in (0,1)");
        if (!(rho > 0.0 && rho < 1.0))
            throw invalid_parameter("rho must be in (0,1)");
    }
};

// floor(log tau / log(1-rho)): the cluster-expansion iteration cap,
// independent of data size.
inline int max_iterations(double tau, double rho) {
    if (!(tau > 0.0 && tau < 1.0) || !(rho > 0.0 && rho < 1.0))
        throw invalid_parameter("max_iterations: tau and rho must be in (0,1)");
    return static_cast<int>(std::floor(std::log(tau) / std::log(1.0 - rho)));
}

struct ClusterState {
    int id = 0;
    std::vector<std::size_t> members;  // point indices, ascending
    MeanMap map;
    int iterations_used = 0;
    std::vector<double> gamma_history;  // gamma used per expansion iteration
};

struct RuntimeSplit {
    double model_build_s = 0.0;
    double embed_s = 0.0;
    double cluster_s = 0.0;
    double post_s = 0.0;

    double total() const { return model_build_s + embed_s + cluster_s + post_s; }
};

struct ClusteringResult {
    std::vector<int> labels;  // cluster id >= 0, or -1 for noise
    int k = 0;
    std::vector<int> per_cluster_iterations;
    std::vector<std::vector<double>> gamma_history;
    double objective = 0.0;  // Gamma(D): total within-cluster similarity
    std::vector<ClusterState> clusters;
    RuntimeSplit runtime;

    std::size_t noise_count() const {
        return static_cast<std::size_t>(
            std::count(labels.begin(), labels.end(), -1));
    }
};

// argmax over `remaining` of K-hat(x, remaining); ties to lowest index.
// Signals termination (nullopt) when fewer than 2 points remain.
inline std::optional<std::size_t> select_seed(
    std::span<const FeatureIndexVector> embeddings,
    std::span<const std::size_t> remaining, const MeanMap& map_of_remaining) {
    if (remaining.size() < 2) return std::nullopt;
    double best = -1.0;
    std::size_t best_idx = remaining.front();
    for (std::size_t idx : remaining) {
        double s = map_of_remaining.similarity(embeddings[idx]);
        if (s > best) {
            best = s;
            best_idx = idx;
        }
    }
    return best_idx;
}

namespace detail {

inline MeanMap map_of(std::span<const FeatureIndexVector> embeddings,
                      std::span<const std::size_t> members,
                      std::size_t t, std::size_t psi) {
    MeanMap m(t, psi);
    for (std::size_t idx : members) m.add_member(embeddings[idx]);
    return m;
}

}  // namespace detail

// One cluster grown from `seed` over the remaining points. Returns
// nullopt when the initial threshold gamma_0 already falls at or below
// tau, which terminates the outer loop.
inline std::optional<ClusterState> grow_cluster(
    std::span<const FeatureIndexVector> embeddings,
    std::span<const std::size_t> remaining, std::size_t seed,
    const PskcParams& params, std::size_t t, std::size_t psi) {
    // Most similar point to the seed alone.
    double best = -1.0;
    std::size_t partner = seed;
    for (std::size_t idx : remaining) {
        if (idx == seed) continue;
        double s = PartitioningModel::kappa(embeddings[idx], embeddings[seed]);
        if (s > best) {
            best = s;
            partner = idx;
        }
    }
    double gamma = (1.0 - params.rho) * best;
    if (gamma <= params.tau) return std::nullopt;

    ClusterState state{0,
                       {std::min(seed, partner), std::max(seed, partner)},
                       detail::map_of(embeddings, std::array{seed, partner}, t, psi),
                       0,
                       {}};

    const int cap = max_iterations(params.tau, params.rho);
    std::vector<std::size_t> next;
    while (gamma > params.tau) {
        state.gamma_history.push_back(gamma);
        next.clear();
        // Parallel scan against the immutable map snapshot; chunks are
        // merged in order so the result stays deterministic.
        std::vector<std::vector<std::size_t>> chunks(thread_count());
        parallel_chunks(remaining.size(),
                        [&](std::size_t w, std::size_t begin, std::size_t end) {
                            auto& hits = chunks[w];
                            for (std::size_t r = begin; r < end; ++r) {
                                std::size_t idx = remaining[r];
                                if (state.map.similarity(embeddings[idx]) > gamma)
                                    hits.push_back(idx);
                            }
                        });
        for (auto& hits : chunks) next.insert(next.end(), hits.begin(), hits.end());
        ++state.iterations_used;
        gamma *= 1.0 - params.rho;
        if (next.empty()) break;  // growth completed early; keep G_{i-1}
        if (next != state.members) {
            state.members = next;
            state.map = detail::map_of(embeddings, state.members, t, psi);
        }
        if (state.iterations_used > cap)
            throw std::logic_error("iteration bound exceeded");
    }
    return state;
}

// Total within-cluster similarity (the post-processing objective),
// recomputed from labels with fresh mean maps.
inline double total_similarity(std::span<const FeatureIndexVector> embeddings,
                               std::span<const int> labels, int k,
                               std::size_t t, std::size_t psi) {
    if (k == 0) return 0.0;
    std::vector<MeanMap> maps(static_cast<std::size_t>(k), MeanMap(t, psi));
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) maps[static_cast<std::size_t>(labels[i])].add_member(embeddings[i]);
    double gamma_total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0)
            gamma_total += maps[static_cast<std::size_t>(labels[i])].similarity(embeddings[i]);
    return gamma_total;
}

// Single reassignment pass over each cluster's bottom-decile members
// against frozen mean maps; committed only if the objective strictly
// increases. Noise is never touched.
inline ClusteringResult post_process(const ClusteringResult& result,
                                     std::span<const FeatureIndexVector> embeddings,
                                     std::size_t t, std::size_t psi) {
    if (result.k <= 1) return result;

    std::vector<int> labels = result.labels;
    bool moved = false;
    for (const auto& cluster : result.clusters) {
        std::vector<std::pair<double, std::size_t>> sims;
        sims.reserve(cluster.members.size());
        for (std::size_t idx : cluster.members)
            sims.emplace_back(cluster.map.similarity(embeddings[idx]), idx);
        std::sort(sims.begin(), sims.end());
        std::size_t decile = (sims.size() + 9) / 10;
        double cutoff = sims[decile == 0 ? 0 : decile - 1].first;
        for (auto [sim, idx] : sims) {
            if (sim > cutoff) break;
            double best = sim;
            int best_j = cluster.id;
            for (const auto& other : result.clusters) {
                if (other.id == cluster.id) continue;
                double s = other.map.similarity(embeddings[idx]);
                if (s > best || (s == best && other.id < best_j)) {
                    best = s;
                    best_j = other.id;
                }
            }
            if (best_j != cluster.id) {
                labels[idx] = best_j;
                moved = true;
            }
        }
    }
    if (!moved) return result;

    double gamma_after = total_similarity(embeddings, labels, result.k, t, psi);
    if (gamma_after <= result.objective) return result;  // rollback

    ClusteringResult out = result;
    out.labels = std::move(labels);
    out.objective = gamma_after;
    for (auto& cluster : out.clusters) {
        cluster.members.clear();
        cluster.map = MeanMap(t, psi);
    }
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
        if (out.labels[i] < 0) continue;
        auto& cluster = out.clusters[static_cast<std::size_t>(out.labels[i])];
        cluster.members.push_back(i);
        cluster.map.add_member(embeddings[i]);
    }
    return out;
}

struct ClusterOptions {
    bool run_post_process = true;
};

inline ClusteringResult cluster(const Dataset& data, const PskcParams& params,
                                const ClusterOptions& options = {}) {
    using clock = std::chrono::steady_clock;
    params.validate();
    data.validate();
    if (data.n < 2) throw invalid_input("clustering needs at least 2 points");

    ClusteringResult result;
    auto t0 = clock::now();
    auto model = PartitioningModel::build(data, params.kernel);
    auto t1 = clock::now();
    auto embeddings = embed_all(model, data);
    auto t2 = clock::now();

    const std::size_t t = model.t(), psi = model.psi();
    result.labels.assign(data.n, -1);

    std::vector<std::size_t> remaining(data.n);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    MeanMap remaining_map = detail::map_of(embeddings, remaining, t, psi);

    while (remaining.size() > 1) {
        auto seed = select_seed(embeddings, remaining, remaining_map);
        if (!seed) break;
        auto grown = grow_cluster(embeddings, remaining, *seed, params, t, psi);
        if (!grown) break;
        grown->id = result.k;
        for (std::size_t idx : grown->members) {
            result.labels[idx] = grown->id;
            remaining_map.remove_member(embeddings[idx]);
        }
        std::erase_if(remaining,
                      [&](std::size_t idx) { return result.labels[idx] >= 0; });
        result.per_cluster_iterations.push_back(grown->iterations_used);
        result.gamma_history.push_back(grown->gamma_history);
        result.clusters.push_back(std::move(*grown));
        ++result.k;
    }
    result.objective = total_similarity(embeddings, result.labels, result.k, t, psi);
    auto t3 = clock::now();

    if (options.run_post_process && result.k > 1) {
        auto processed = post_process(result, embeddings, t, psi);
        processed.runtime = result.runtime;
        result = std::move(processed);
    }
    auto t4 = clock::now();

    auto secs = [](auto a, auto b) {
        return std::chrono::duration<double>(b - a).count();
    };
    result.runtime = {secs(t0, t1), secs(t1, t2), secs(t2, t3), secs(t3, t4)};
    return result;
}

}  // namespace pskc

#endif
