#ifndef PSKC_METRICS_HPP
#define PSKC_METRICS_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "pskc/common.hpp"
#include "pskc/engine.hpp"
#include "pskc/generators.hpp"

namespace pskc {

struct EvalReport {
    double f1 = 0.0;
    int k_found = 0;
    double noise_fraction = 0.0;
    RuntimeSplit runtime_split;
    double objective_before = 0.0;
    double objective_after = 0.0;
    std::size_t reassigned_count = 0;
};

// Class-weighted best-match F1: sum_c (|c|/n) max_j F(c, G_j), with
// F = 2PR/(P+R). Noise (-1) forms its own predicted group so that
// over-noising is penalized through recall.
inline double f1_score(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size())
        throw invalid_input("f1_score: label length mismatch");
    const auto n = pred.size();
    std::map<int, std::size_t> class_sizes, pred_sizes;
    std::map<std::pair<int, int>, std::size_t> joint;
    for (std::size_t i = 0; i < n; ++i) {
        ++class_sizes[truth[i]];
        ++pred_sizes[pred[i]];
        ++joint[{truth[i], pred[i]}];
    }
    if (class_sizes.empty())
        throw invalid_input("f1_score: no classes in truth");
    double total = 0.0;
    for (auto [c, c_size] : class_sizes) {
        double best = 0.0;
        for (auto [j, j_size] : pred_sizes) {
            auto it = joint.find({c, j});
            if (it == joint.end()) continue;
            double overlap = static_cast<double>(it->second);
            double precision = overlap / static_cast<double>(j_size);
            double recall = overlap / static_cast<double>(c_size);
            double f = 2.0 * precision * recall / (precision + recall);
            best = std::max(best, f);
        }
        total += (static_cast<double>(c_size) / static_cast<double>(n)) * best;
    }
    return total;
}

struct StabilitySummary {
    std::vector<double> per_trial_f1;
    double min = 0.0, median = 0.0, max = 0.0, iqr = 0.0;
};

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Repeated clustering with trial-indexed kernel seeds (base_seed + i)
// and fixed (psi, t, tau, rho).
inline StabilitySummary stability_trial(const LabeledDataset& dataset,
                                        const PskcParams& params, int trials) {
    if (!dataset.has_truth())
        throw invalid_input("stability_trial needs ground truth");
    if (trials < 2)
        throw invalid_parameter("stability_trial: trials must be >= 2");
    StabilitySummary summary;
    for (int i = 0; i < trials; ++i) {
        PskcParams p = params;
        p.kernel.rng_seed = params.kernel.rng_seed + i;
        auto result = cluster(dataset.data, p);
        summary.per_trial_f1.push_back(f1_score(result.labels, dataset.truth));
    }
    auto sorted = summary.per_trial_f1;
    std::sort(sorted.begin(), sorted.end());
    summary.min = sorted.front();
    summary.max = sorted.back();
    summary.median = quantile_sorted(sorted, 0.5);
    summary.iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    return summary;
}

struct BenchRow {
    std::size_t n = 0;
    RuntimeSplit split;      // median of repetitions, per phase
    double cluster_ratio = 0.0;  // cluster-phase time relative to the base size
};

// Runtime scaling over dataset sizes on a fixed-k Gaussian mixture;
// wall-clock, median of `repetitions` per size. The cluster-phase time
// excludes model build and embedding, which are reported separately.
inline std::vector<BenchRow> scaleup_bench(std::span<const std::size_t> sizes,
                                           const PskcParams& params,
                                           std::size_t k_blobs = 4,
                                           int repetitions = 3,
                                           std::uint64_t data_seed = 1) {
    std::vector<BenchRow> rows;
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] < sizes[i - 1])
            throw invalid_parameter("scaleup_bench: sizes must be ascending");
    for (std::size_t n : sizes) {
        auto ds = generate_gaussian_mixture(k_blobs, n / k_blobs, 0.06, data_seed);
        std::vector<RuntimeSplit> reps;
        for (int r = 0; r < repetitions; ++r)
            reps.push_back(cluster(ds.data, params).runtime);
        auto median_of = [&](auto field) {
            std::vector<double> v;
            for (const auto& s : reps) v.push_back(s.*field);
            std::sort(v.begin(), v.end());
            return v[v.size() / 2];
        };
        BenchRow row;
        row.n = ds.data.n;
        row.split.model_build_s = median_of(&RuntimeSplit::model_build_s);
        row.split.embed_s = median_of(&RuntimeSplit::embed_s);
        row.split.cluster_s = median_of(&RuntimeSplit::cluster_s);
        row.split.post_s = median_of(&RuntimeSplit::post_s);
        rows.push_back(row);
    }
    if (!rows.empty() && rows.front().split.cluster_s > 0.0)
        for (auto& row : rows)
            row.cluster_ratio = row.split.cluster_s / rows.front().split.cluster_s;
    return rows;
}

inline EvalReport post_process_report(const ClusteringResult& before,
                                      const ClusteringResult& after) {
    if (before.labels.size() != after.labels.size())
        throw invalid_input("post_process_report: result size mismatch");
    EvalReport report;
    report.k_found = after.k;
    report.objective_before = before.objective;
    report.objective_after = after.objective;
    report.noise_fraction = static_cast<double>(after.noise_count()) /
                            static_cast<double>(after.labels.size());
    for (std::size_t i = 0; i < before.labels.size(); ++i)
        if (before.labels[i] != after.labels[i]) ++report.reassigned_count;
    report.runtime_split = after.runtime;
    return report;
}

inline void write_bench_csv(const std::string& path,
                            std::span<const BenchRow> rows) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "n,model_build_s,embed_s,cluster_s,post_s,cluster_ratio\n";
    for (const auto& r : rows)
        out << r.n << ',' << r.split.model_build_s << ',' << r.split.embed_s
            << ',' << r.split.cluster_s << ',' << r.split.post_s << ','
            << r.cluster_ratio << '\n';
}

}  // namespace pskc

#endif
