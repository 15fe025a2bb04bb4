#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "strokebench/errors.hpp"
#include "strokebench/pipeline.hpp"

namespace sb = strokebench;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<std::int64_t> seed;
    bool verbose = false;
};

sb::PipelineConfig load_config(const GlobalOpts& opts) {
    if (opts.config_path.empty()) throw sb::ConfigError("--config is required");
    sb::PipelineConfig cfg = sb::load_pipeline_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (opts.seed) {
        cfg.seed = static_cast<std::uint64_t>(*opts.seed);
        cfg.tsne.seed = cfg.seed;
    }
    return cfg;
}

void print_summary(const sb::BenchmarkReport& report, bool verbose) {
    std::printf("selected K = %d%s\n", report.sweep.selected_k,
                report.sweep.fallback ? " (fallback)" : "");
    std::printf("benchmark cluster = %d\n", report.benchmark.benchmark_index);
    std::printf("cluster_index  distance_to_ideal  size\n");
    std::vector<int> sizes(static_cast<std::size_t>(report.clusters.k), 0);
    for (int a : report.clusters.assignments) ++sizes[static_cast<std::size_t>(a)];
    for (int q = 0; q < report.clusters.k; ++q)
        std::printf("%9d  %17.4f  %4d\n", q,
                    report.benchmark.distances[static_cast<std::size_t>(q)],
                    sizes[static_cast<std::size_t>(q)]);
    if (verbose) {
        std::printf("k-means inertia = %.6f\n", report.clusters.inertia);
        if (report.embedding) std::printf("t-SNE final KL = %.6f\n", report.embedding->final_kl);
        if (report.sub)
            std::printf("sub-clusters of cluster %d: k = %d\n", report.sub->parent_cluster,
                        report.sub->model.k);
    }
}

int cmd_run(const GlobalOpts& opts, bool dump_orientation) {
    sb::PipelineConfig cfg = load_config(opts);
    cfg.dump_orientation = cfg.dump_orientation || dump_orientation;
    const sb::BenchmarkReport report = sb::run_pipeline(cfg);
    print_summary(report, opts.verbose);
    std::printf("artifacts written to %s\n", cfg.output_dir.string().c_str());
    return 0;
}

int cmd_euler(const GlobalOpts& opts, bool dump_orientation) {
    sb::PipelineConfig cfg = load_config(opts);
    cfg.dump_orientation = cfg.dump_orientation || dump_orientation;
    std::filesystem::create_directories(cfg.output_dir);
    const sb::MotionData motion = sb::run_motion_stages(cfg);
    const auto dir = cfg.output_dir / "euler";
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < motion.ids.size(); ++i) {
        const auto& id = motion.ids[i];
        sb::write_joint_track_csv(motion.raw_tracks[i],
                                  dir / (id.person_id + "_s" + std::to_string(id.stroke_index) +
                                         ".csv"));
    }
    std::printf("wrote %zu joint-angle tracks to %s\n", motion.ids.size(), dir.string().c_str());
    return 0;
}

int cmd_cluster(const GlobalOpts& opts, const std::string& points_path) {
    sb::PipelineConfig cfg = load_config(opts);
    auto [points, ids] = sb::read_points_csv(points_path);
    std::vector<std::string> persons;
    for (const auto& id : ids)
        if (std::find(persons.begin(), persons.end(), id.person_id) == persons.end())
            persons.push_back(id.person_id);
    const sb::BenchmarkReport report =
        sb::run_analysis_stages(cfg, points, ids, persons, nullptr);
    std::filesystem::create_directories(cfg.output_dir);
    sb::emit_tables(report, cfg.output_dir);
    sb::emit_plots(report, cfg.output_dir);
    sb::save_report(report, cfg.output_dir / "report.json");
    print_summary(report, opts.verbose);
    return 0;
}

int cmd_sweep(const GlobalOpts& opts, const std::string& points_path) {
    sb::PipelineConfig cfg = load_config(opts);
    auto [points, ids] = sb::read_points_csv(points_path);
    auto [profile, result] = sb::sigma_sweep(points, cfg.sweep_grid, cfg.k_max);

    sb::BenchmarkReport report;  // eigengap artifacts only
    report.grid = cfg.sweep_grid;
    report.k_max = cfg.k_max;
    report.profile = profile;
    report.sweep = result;

    std::filesystem::create_directories(cfg.output_dir);
    {
        std::ofstream out(cfg.output_dir / "eigengaps.csv", std::ios::binary);
        out << "sigma";
        for (int k = 1; k <= report.k_max; ++k) out << ",gap_" << k;
        out << '\n';
        for (std::size_t i = 0; i < profile.sigma_grid.size(); ++i) {
            if (profile.gaps[i].empty()) continue;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.9g", profile.sigma_grid[i]);
            out << buf;
            for (int k = 1; k <= report.k_max; ++k) {
                std::snprintf(buf, sizeof(buf), "%.9g", profile.gaps[i][static_cast<std::size_t>(k - 1)]);
                out << ',' << buf;
            }
            out << '\n';
        }
    }
    std::printf("selected K = %d%s\n", result.selected_k, result.fallback ? " (fallback)" : "");
    for (const auto& [k, measure] : result.dominance)
        if (measure > 0.0) std::printf("  gap %d dominates %.3f log10-sigma units\n", k, measure);
    sb::emit_plots(report, cfg.output_dir);
    return 0;
}

int cmd_report(const GlobalOpts& opts, const std::string& report_path) {
    if (opts.out_dir.empty()) throw sb::ConfigError("report requires --out");
    const sb::BenchmarkReport report = sb::load_report(report_path);
    sb::emit_tables(report, opts.out_dir);
    sb::emit_plots(report, opts.out_dir);
    print_summary(report, opts.verbose);
    std::printf("artifacts written to %s\n", opts.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strokebench: IMU stroke-performance benchmarking pipeline"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--config", opts.config_path, "pipeline configuration JSON")
        ->envname("STROKEBENCH_CONFIG");
    app.add_option("--out", opts.out_dir, "output directory (overrides config)");
    app.add_option("--seed", opts.seed, "root RNG seed (overrides config)");
    app.add_flag("--verbose", opts.verbose, "print extra diagnostics");

    bool dump_orientation = false;
    std::string points_path;
    std::string report_path;

    auto* run = app.add_subcommand("run", "full pipeline: session to report bundle");
    run->add_flag("--dump-orientation", dump_orientation,
                  "write per-sensor orientation debug CSVs");

    auto* euler = app.add_subcommand("euler", "stop after joint-angle extraction");
    euler->add_flag("--dump-orientation", dump_orientation,
                    "write per-sensor orientation debug CSVs");

    auto* cluster = app.add_subcommand("cluster", "cluster pre-mapped performance points");
    cluster->add_option("--points", points_path, "points CSV (person_id,stroke_index,s1..s5)")
        ->required();

    auto* sweep = app.add_subcommand("sweep", "eigengap sigma sweep only");
    sweep->add_option("--points", points_path, "points CSV (person_id,stroke_index,s1..s5)")
        ->required();

    auto* report = app.add_subcommand("report", "re-emit tables and plots from a report.json");
    report->add_option("--in", report_path, "report.json produced by `run`")->required();

    for (auto* sub : {run, euler, cluster, sweep, report}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opts, dump_orientation);
        if (euler->parsed()) return cmd_euler(opts, dump_orientation);
        if (cluster->parsed()) return cmd_cluster(opts, points_path);
        if (sweep->parsed()) return cmd_sweep(opts, points_path);
        if (report->parsed()) return cmd_report(opts, report_path);
    } catch (const sb::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
