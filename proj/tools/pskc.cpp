// pskc: point-set kernel clustering over CSV data and PNG images.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "pskc/csv.hpp"
#include "pskc/engine.hpp"
#include "pskc/generators.hpp"
#include "pskc/image.hpp"
#include "pskc/metrics.hpp"
#include "pskc/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CommonParams {
    std::size_t psi = 32;
    std::size_t t = 100;
    double tau = 0.1;
    double rho = 0.1;
    std::int64_t seed = 42;
    unsigned threads = 0;

    pskc::PskcParams to_pskc() const {
        pskc::PskcParams p;
        p.tau = tau;
        p.rho = rho;
        p.kernel = {psi, t, seed};
        return p;
    }
};

void add_common(CLI::App* cmd, CommonParams& p) {
    cmd->add_option("--psi", p.psi, "Subsample size per partitioning")->default_val(32);
    cmd->add_option("--t", p.t, "Number of partitionings")->default_val(100);
    cmd->add_option("--tau", p.tau, "Similarity threshold in (0,1)")->default_val(0.1);
    cmd->add_option("--rho", p.rho, "Growth rate in (0,1)")->default_val(0.1);
    cmd->add_option("--seed", p.seed, "Kernel RNG seed")->default_val(42);
    cmd->add_option("--threads", p.threads,
                    "Worker threads (default: machine parallelism; "
                    "env PSKC_THREADS also honored)");
}

void validate_common(const CommonParams& p) {
    if (!(p.tau > 0.0 && p.tau < 1.0))
        throw CLI::ValidationError("tau must be in (0,1)");
    if (!(p.rho > 0.0 && p.rho < 1.0))
        throw CLI::ValidationError("rho must be in (0,1)");
    if (p.psi < 2) throw CLI::ValidationError("psi must be >= 2");
    if (p.t < 1) throw CLI::ValidationError("t must be >= 1");
    if (p.threads > 0) pskc::thread_count() = p.threads;
}

void print_summary(const pskc::ClusteringResult& result) {
    std::printf("clusters:   %d\n", result.k);
    std::printf("noise:      %zu\n", result.noise_count());
    std::printf("objective:  %.6f\n", result.objective);
    std::printf("iterations:");
    for (int it : result.per_cluster_iterations) std::printf(" %d", it);
    std::printf("\n");
    const auto& rt = result.runtime;
    std::printf("runtime:    build %.3fs  embed %.3fs  cluster %.3fs  post %.3fs\n",
                rt.model_build_s, rt.embed_s, rt.cluster_s, rt.post_s);
}

constexpr const char* kTuningGuide =
    "Tuning guide: rho=0.1 is a reasonable default. If clusters come out\n"
    "joined but should be split, increase psi. If clusters come out split\n"
    "but should be joined, decrease tau. Typical ranges: psi in [2,1024],\n"
    "tau in [1e-5, 1e-1], rho in [0.1, 0.26].";

int run_cluster(const CommonParams& common, const std::string& input,
                const std::string& output, bool label_col_last, bool no_post,
                bool dry_run, const std::string& save_model) {
    validate_common(common);
    auto params = common.to_pskc();
    if (dry_run) {
        std::printf("config ok; max iterations per cluster: %d\n",
                    pskc::max_iterations(params.tau, params.rho));
        return kExitOk;
    }
    auto ds = pskc::load_csv(input, label_col_last);
    auto result = pskc::cluster(ds.data, params, {.run_post_process = !no_post});
    if (!output.empty()) pskc::write_labels(output, result);
    if (!save_model.empty())
        pskc::PartitioningModel::build(ds.data, params.kernel).save(save_model);
    print_summary(result);
    if (ds.has_truth())
        std::printf("f1:         %.4f\n", pskc::f1_score(result.labels, ds.truth));
    return kExitOk;
}

int run_segment(const CommonParams& common, const std::string& input,
                const std::string& output, const std::string& mask_prefix,
                bool no_post) {
    validate_common(common);
    auto image = pskc::load_image_cielab(input);
    auto data = image.as_dataset();
    auto result = pskc::cluster(data, common.to_pskc(), {.run_post_process = !no_post});
    pskc::write_segmented_image(output, image, result);
    if (!mask_prefix.empty()) pskc::write_cluster_masks(mask_prefix, image, result);
    print_summary(result);
    return kExitOk;
}

int run_bench(const CommonParams& common, const std::vector<std::size_t>& sizes,
              const std::string& output) {
    validate_common(common);
    auto rows = pskc::scaleup_bench(sizes, common.to_pskc());
    std::printf("%10s %12s %10s %12s %8s %8s\n", "n", "build_s", "embed_s",
                "cluster_s", "post_s", "ratio");
    for (const auto& r : rows)
        std::printf("%10zu %12.4f %10.4f %12.4f %8.4f %8.3f\n", r.n,
                    r.split.model_build_s, r.split.embed_s, r.split.cluster_s,
                    r.split.post_s, r.cluster_ratio);
    if (!output.empty()) pskc::write_bench_csv(output, rows);
    return kExitOk;
}

int run_eval(const CommonParams& common, const std::string& input, int trials) {
    validate_common(common);
    auto ds = pskc::load_csv(input, /*label_col_last=*/true);
    if (trials >= 2) {
        auto summary = pskc::stability_trial(ds, common.to_pskc(), trials);
        std::printf("trial F1:");
        for (double f : summary.per_trial_f1) std::printf(" %.4f", f);
        std::printf("\nmin %.4f  median %.4f  max %.4f  iqr %.4f\n", summary.min,
                    summary.median, summary.max, summary.iqr);
        return kExitOk;
    }
    auto params = common.to_pskc();
    auto before = pskc::cluster(ds.data, params, {.run_post_process = false});
    auto embeddings = pskc::embed_all(
        pskc::PartitioningModel::build(ds.data, params.kernel), ds.data);
    auto after = pskc::post_process(before, embeddings, params.kernel.t,
                                    params.kernel.psi);
    auto report = pskc::post_process_report(before, after);
    print_summary(after);
    std::printf("f1:         %.4f\n", pskc::f1_score(after.labels, ds.truth));
    std::printf("post: objective %.6f -> %.6f, %zu reassigned\n",
                report.objective_before, report.objective_after,
                report.reassigned_count);
    return kExitOk;
}

int run_gen(const std::string& type, std::size_t n_per_cluster, std::size_t k,
            double spread, double noise_fraction, std::uint64_t seed,
            const std::string& output) {
    pskc::LabeledDataset ds;
    if (type == "ring-g") {
        ds = pskc::generate_ring_g(n_per_cluster, noise_fraction, seed);
    } else if (type == "mixture") {
        ds = pskc::generate_gaussian_mixture(k, n_per_cluster, spread, seed);
    } else {
        throw CLI::ValidationError("unknown generator type: " + type);
    }
    pskc::write_csv(output, ds);
    std::printf("wrote %zu points (%zu-D) to %s\n", ds.data.n, ds.data.d,
                output.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-set kernel clustering (psKC)"};
    app.require_subcommand(1);

    CommonParams common;

    // cluster
    std::string input, output, save_model;
    bool label_col_last = false, no_post = false, dry_run = false;
    auto* cluster_cmd = app.add_subcommand(
        "cluster", std::string("Cluster a CSV dataset.\n") + kTuningGuide);
    cluster_cmd->add_option("--input", input, "Input CSV")->required();
    cluster_cmd->add_option("--out", output, "Labels CSV (index,label)");
    cluster_cmd->add_flag("--label-col", label_col_last,
                          "Treat the last CSV column as ground-truth labels");
    cluster_cmd->add_flag("--no-post", no_post, "Skip post-processing");
    cluster_cmd->add_flag("--dry-run", dry_run,
                          "Validate config and print the iteration bound");
    cluster_cmd->add_option("--save-model", save_model,
                            "Write the partitioning model to this path");
    add_common(cluster_cmd, common);

    // segment
    std::string seg_in, seg_out, mask_prefix;
    bool seg_no_post = false;
    auto* segment_cmd =
        app.add_subcommand("segment", "Segment an 8-bit PNG via CIELAB clustering");
    segment_cmd->add_option("--input", seg_in, "Input PNG")->required();
    segment_cmd->add_option("--out", seg_out, "Segmented PNG")->required();
    segment_cmd->add_option("--masks", mask_prefix, "Per-cluster mask path prefix");
    segment_cmd->add_flag("--no-post", seg_no_post, "Skip post-processing");
    add_common(segment_cmd, common);

    // bench
    std::vector<std::size_t> sizes;
    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Runtime scaling benchmark");
    bench_cmd->add_option("--sizes", sizes, "Dataset sizes (comma-separated)")
        ->required()
        ->delimiter(',');
    bench_cmd->add_option("--out", bench_out, "Timing table CSV");
    add_common(bench_cmd, common);

    // eval
    std::string eval_in;
    int trials = 0;
    auto* eval_cmd = app.add_subcommand(
        "eval", "Evaluate against ground truth (last CSV column = labels)");
    eval_cmd->add_option("--input", eval_in, "Labeled CSV")->required();
    eval_cmd->add_option("--trials", trials,
                         "Stability trials with seeds seed..seed+trials-1");
    add_common(eval_cmd, common);

    // gen
    std::string gen_type = "mixture", gen_out;
    std::size_t gen_n = 500, gen_k = 4;
    double gen_spread = 0.06, gen_noise = 0.0;
    std::uint64_t gen_seed = 1;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen_cmd->add_option("--type", gen_type, "ring-g | mixture");
    gen_cmd->add_option("--n-per-cluster", gen_n, "Points per cluster");
    gen_cmd->add_option("--k", gen_k, "Blob count (mixture only)");
    gen_cmd->add_option("--spread", gen_spread, "Blob sigma (mixture only)");
    gen_cmd->add_option("--noise-fraction", gen_noise, "Extra uniform noise share");
    gen_cmd->add_option("--seed", gen_seed, "Generator seed");
    gen_cmd->add_option("--out", gen_out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cluster_cmd->parsed())
            return run_cluster(common, input, output, label_col_last, no_post,
                               dry_run, save_model);
        if (segment_cmd->parsed())
            return run_segment(common, seg_in, seg_out, mask_prefix, seg_no_post);
        if (bench_cmd->parsed()) return run_bench(common, sizes, bench_out);
        if (eval_cmd->parsed()) return run_eval(common, eval_in, trials);
        if (gen_cmd->parsed())
            return run_gen(gen_type, gen_n, gen_k, gen_spread, gen_noise, gen_seed,
                           gen_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const pskc::invalid_parameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
