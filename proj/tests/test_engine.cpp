#include <doctest.h>

#include <algorithm>
#include <set>

#include "pskc/engine.hpp"
#include "pskc/generators.hpp"
#include "pskc/rng.hpp"

using namespace pskc;

namespace {

Dataset two_blobs(std::size_t per_blob, double gap, double sigma,
                  std::uint64_t seed) {
    SplitMix64 rng(seed);
    Dataset data;
    data.d = 2;
    for (std::size_t i = 0; i < 2 * per_blob; ++i) {
        double base = i < per_blob ? 0.0 : gap;
        double p[2] = {base + sigma * rng.next_gaussian(),
                       sigma * rng.next_gaussian()};
        data.push_back({p, 2});
    }
    return data;
}

void check_run_invariants(const ClusteringResult& result, const Dataset& data,
                          const PskcParams& params) {
    CHECK(result.labels.size() == data.n);
    int cap = max_iterations(params.tau, params.rho);
    for (int used : result.per_cluster_iterations) CHECK(used <= cap);

    std::set<int> ids;
    for (int label : result.labels) {
        CHECK(label >= -1);
        if (label >= 0) ids.insert(label);
    }
    CHECK(static_cast<int>(ids.size()) == result.k);

    // gamma schedule: strictly geometric with ratio (1-rho)
    for (const auto& history : result.gamma_history) {
        CHECK(!history.empty());
        for (std::size_t i = 1; i < history.size(); ++i)
            CHECK(history[i] ==
                  doctest::Approx((1.0 - params.rho) * history[i - 1]).epsilon(1e-12));
        CHECK(history.back() > params.tau);
    }

    // objective matches a recompute from labels
    auto model = PartitioningModel::build(data, params.kernel);
    auto embeddings = embed_all(model, data);
    double recomputed = total_similarity(embeddings, result.labels, result.k,
                                         model.t(), model.psi());
    CHECK(result.objective == doctest::Approx(recomputed).epsilon(1e-8));
}

}  // namespace

TEST_CASE("max_iterations formula") {
    CHECK(max_iterations(1e-5, 0.1) == 109);
    CHECK(max_iterations(0.1, 0.1) == 21);
    CHECK(max_iterations(0.5, 0.5) == 1);
    CHECK_THROWS_AS(max_iterations(0.0, 0.1), invalid_parameter);
    CHECK_THROWS_AS(max_iterations(0.1, 1.0), invalid_parameter);
    CHECK_THROWS_AS(max_iterations(2.0, 0.1), invalid_parameter);
}

TEST_CASE("select_seed: ties, blob preference, termination") {
    // two identical points -> first index wins the tie
    Dataset twins({1.0, 2.0, 1.0, 2.0}, 2, 2);
    auto model = PartitioningModel::build(twins, {2, 10, 1});
    auto embeddings = embed_all(model, twins);
    std::vector<std::size_t> remaining{0, 1};
    auto map = MeanMap::of(model, embeddings);
    auto seed = select_seed(embeddings, remaining, map);
    REQUIRE(seed.has_value());
    CHECK(*seed == 0);

    // singleton -> termination signal
    std::vector<std::size_t> one{0};
    CHECK_FALSE(select_seed(embeddings, one, map).has_value());
}

TEST_CASE("select_seed: dense blob beats outliers") {
    SplitMix64 rng(6);
    Dataset data;
    data.d = 2;
    for (int i = 0; i < 60; ++i) {
        double p[2] = {0.2 * rng.next_gaussian(), 0.2 * rng.next_gaussian()};
        data.push_back({p, 2});
    }
    for (double off : {15.0, -17.0, 21.0}) {
        double p[2] = {off, off};
        data.push_back({p, 2});
    }
    auto model = PartitioningModel::build(data, {8, 100, 3});
    auto embeddings = embed_all(model, data);
    std::vector<std::size_t> remaining(data.n);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    auto map = MeanMap::of(model, embeddings);
    auto seed = select_seed(embeddings, remaining, map);
    REQUIRE(seed.has_value());
    CHECK(*seed < 60);  // inside the blob

    // oracle: argmax of averaged pairwise kernel
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < data.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < data.n; ++j)
            s += PartitioningModel::kappa(embeddings[i], embeddings[j]);
        if (s > best) {
            best = s;
            best_idx = i;
        }
    }
    CHECK(*seed == best_idx);
}

TEST_CASE("grow_cluster: identical points are all captured in one iteration") {
    Dataset data(std::vector<double>(20, 3.5), 10, 2);
    auto model = PartitioningModel::build(data, {2, 10, 1});
    auto embeddings = embed_all(model, data);
    std::vector<std::size_t> remaining(data.n);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    PskcParams params{0.1, 0.1, {2, 10, 1}};
    auto state = grow_cluster(embeddings, remaining, 0, params, model.t(), model.psi());
    REQUIRE(state.has_value());
    CHECK(state->members.size() == data.n);
}

TEST_CASE("grow_cluster: members stay inside the seed's blob") {
    auto data = two_blobs(100, 50.0, 0.3, 11);
    auto model = PartitioningModel::build(data, {16, 100, 2});
    auto embeddings = embed_all(model, data);
    std::vector<std::size_t> remaining(data.n);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    PskcParams params{0.05, 0.1, {16, 100, 2}};
    auto state = grow_cluster(embeddings, remaining, 5, params, model.t(), model.psi());
    REQUIRE(state.has_value());
    CHECK(state->members.size() > 50);
    for (std::size_t idx : state->members) CHECK(idx < 100);
    CHECK(state->iterations_used <= max_iterations(params.tau, params.rho));
}

TEST_CASE("cluster: two separated blobs are recovered exactly") {
    auto data = two_blobs(150, 30.0, 0.3, 21);
    PskcParams params{0.05, 0.1, {8, 100, 42}};
    auto result = cluster(data, params);
    CHECK(result.k == 2);
    CHECK(result.noise_count() == 0);
    int first = result.labels[0];
    for (std::size_t i = 0; i < 150; ++i) CHECK(result.labels[i] == first);
    for (std::size_t i = 150; i < 300; ++i) CHECK(result.labels[i] == 1 - first);
    check_run_invariants(result, data, params);
}

TEST_CASE("cluster: uniform noise with tau near 1 yields no clusters") {
    SplitMix64 rng(31);
    Dataset data;
    data.d = 2;
    for (int i = 0; i < 200; ++i) {
        double p[2] = {10.0 * rng.next_double(), 10.0 * rng.next_double()};
        data.push_back({p, 2});
    }
    PskcParams params{0.95, 0.1, {64, 100, 42}};
    auto result = cluster(data, params);
    CHECK(result.k == 0);
    CHECK(result.noise_count() == data.n);
}

TEST_CASE("cluster: all points identical form a single cluster, no noise") {
    Dataset data(std::vector<double>(40, 1.25), 20, 2);
    PskcParams params{0.1, 0.1, {4, 50, 42}};
    auto result = cluster(data, params);
    CHECK(result.k == 1);
    CHECK(result.noise_count() == 0);
}

TEST_CASE("cluster: determinism across runs") {
    auto ds = generate_ring_g(100, 0.0, 5);
    PskcParams params{0.01, 0.2, {32, 50, 42}};
    auto a = cluster(ds.data, params);
    auto b = cluster(ds.data, params);
    CHECK(a.labels == b.labels);
    CHECK(a.objective == b.objective);
}

TEST_CASE("cluster: n=2 edge cases") {
    // identical pair: kappa = 1, gamma_0 > tau -> one cluster of both
    Dataset twin_pair({0.5, 0.5, 0.5, 0.5}, 2, 2);
    PskcParams params{0.1, 0.1, {2, 50, 1}};
    auto joined = cluster(twin_pair, params);
    CHECK(joined.k == 1);
    CHECK(joined.noise_count() == 0);

    // distinct pair with psi = n = 2: each point isolates the other in
    // every partitioning, kappa = 0, gamma_0 <= tau -> both noise
    Dataset far_pair({0.0, 0.0, 100.0, 100.0}, 2, 2);
    auto rejected = cluster(far_pair, params);
    CHECK(rejected.k == 0);
    CHECK(rejected.noise_count() == 2);
}

TEST_CASE("cluster: noise points sit below tau for every final cluster") {
    // 50 coincident points plus two far outliers, with psi close to n so
    // the outliers are sampled as centres in nearly every partitioning
    // and therefore isolate themselves from the cluster
    Dataset data(std::vector<double>(100, 0.0), 50, 2);
    for (double off : {1000.0, -1000.0}) {
        double p[2] = {off, off};
        data.push_back({p, 2});
    }
    PskcParams params{0.1, 0.1, {50, 200, 42}};
    auto result = cluster(data, params);
    CHECK(result.k == 1);
    CHECK(result.noise_count() == 2);

    auto model = PartitioningModel::build(data, params.kernel);
    auto embeddings = embed_all(model, data);
    for (std::size_t i = 0; i < data.n; ++i) {
        if (result.labels[i] != -1) continue;
        for (const auto& state : result.clusters)
            CHECK(state.map.similarity(embeddings[i]) <= params.tau);
    }
}

TEST_CASE("post_process: k=1 is a no-op") {
    auto data = two_blobs(50, 0.5, 0.3, 51);  // effectively one blob
    PskcParams params{0.01, 0.1, {8, 50, 42}};
    auto result = cluster(data, params, {.run_post_process = false});
    REQUIRE(result.k == 1);
    auto model = PartitioningModel::build(data, params.kernel);
    auto embeddings = embed_all(model, data);
    auto after = post_process(result, embeddings, model.t(), model.psi());
    CHECK(after.labels == result.labels);
    CHECK(after.objective == result.objective);
}

TEST_CASE("post_process: already-optimal separable blobs are untouched") {
    auto data = two_blobs(150, 30.0, 0.3, 61);
    PskcParams params{0.05, 0.1, {8, 100, 42}};
    auto before = cluster(data, params, {.run_post_process = false});
    auto model = PartitioningModel::build(data, params.kernel);
    auto embeddings = embed_all(model, data);
    auto after = post_process(before, embeddings, model.t(), model.psi());
    CHECK(after.labels == before.labels);
    CHECK(after.objective >= before.objective);
}

TEST_CASE("post_process: a mislabeled boundary point moves and the objective rises") {
    auto data = two_blobs(100, 30.0, 0.3, 71);
    PskcParams params{0.05, 0.1, {8, 100, 42}};
    auto honest = cluster(data, params, {.run_post_process = false});
    REQUIRE(honest.k == 2);

    auto model = PartitioningModel::build(data, params.kernel);
    auto embeddings = embed_all(model, data);

    // fabricate a result with one blob-B point assigned to cluster A
    ClusteringResult rigged = honest;
    int a_id = rigged.labels[0];
    int b_id = 1 - a_id;
    std::size_t victim = 150;  // inside blob B
    REQUIRE(rigged.labels[victim] == b_id);
    rigged.labels[victim] = a_id;
    for (auto& state : rigged.clusters) {
        state.members.clear();
        state.map = MeanMap(model.t(), model.psi());
    }
    for (std::size_t i = 0; i < rigged.labels.size(); ++i) {
        if (rigged.labels[i] < 0) continue;
        auto& state = rigged.clusters[static_cast<std::size_t>(rigged.labels[i])];
        state.members.push_back(i);
        state.map.add_member(embeddings[i]);
    }
    rigged.objective = total_similarity(embeddings, rigged.labels, rigged.k,
                                        model.t(), model.psi());

    auto fixed = post_process(rigged, embeddings, model.t(), model.psi());
    CHECK(fixed.labels[victim] == b_id);
    CHECK(fixed.objective > rigged.objective);

    std::size_t reassigned = 0;
    for (std::size_t i = 0; i < fixed.labels.size(); ++i)
        if (fixed.labels[i] != rigged.labels[i]) ++reassigned;
    CHECK(reassigned >= 1);
}

TEST_CASE("parameter validation propagates") {
    Dataset data({0.0, 1.0, 2.0, 3.0}, 2, 2);
    CHECK_THROWS_AS(cluster(data, PskcParams{2.0, 0.1, {2, 10, 1}}),
                    invalid_parameter);
    CHECK_THROWS_AS(cluster(data, PskcParams{0.1, 0.0, {2, 10, 1}}),
                    invalid_parameter);
    CHECK_THROWS_AS(cluster(data, PskcParams{0.1, 0.1, {1, 10, 1}}),
                    invalid_parameter);
    CHECK_THROWS_AS(cluster(data, PskcParams{0.1, 0.1, {3, 10, 1}}),
                    invalid_parameter);  // psi > n
    Dataset single({0.0, 1.0}, 1, 2);
    CHECK_THROWS_AS(cluster(single, PskcParams{0.1, 0.1, {1, 10, 1}}),
                    invalid_input);
}
