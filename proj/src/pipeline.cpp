#include "strokebench/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "strokebench/errors.hpp"
#include "strokebench/geometry.hpp"
#include "strokebench/performance.hpp"
#include "strokebench/svg.hpp"

namespace strokebench {

using nlohmann::json;

namespace {

template <typename Fn>
auto stage(const char* name, const std::string& person, long stroke, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, person, stroke, e.what());
    }
}

std::string csv_num(double v, const char* spec = "%.9g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

}  // namespace

MotionData run_motion_stages(const PipelineConfig& cfg) {
    cfg.validate();
    const SessionManifest manifest =
        stage("ingest", "", -1, [&] { return parse_manifest(cfg.manifest_path); });

    MotionData data;
    for (const auto& participant : manifest.participants) {
        data.persons.push_back(participant.person_id);
        const std::string& person = participant.person_id;

        std::array<SensorStream, 4> streams;
        for (SensorId id : kAllSensors) {
            streams[static_cast<int>(id)] = stage("ingest", person, -1, [&] {
                return parse_sensor_file(participant.sensor_files[static_cast<int>(id)], id,
                                         cfg.scale, cfg.sample_rate_hz);
            });
        }
        const AnnotationIndex ann = stage("ingest", person, -1, [&] {
            auto a = parse_annotation_file(participant.annotation_file);
            if (a.person_id != person)
                throw ValidationError("annotation person_id '" + a.person_id +
                                      "' does not match manifest entry '" + person + "'");
            return a;
        });
        const auto realizations = stage("ingest", person, -1, [&] {
            auto aligned = align_streams(std::move(streams));
            auto split = split_realizations(aligned, ann);
            if (split.size() != manifest.expected_realizations)
                throw ValidationError("expected " +
                                      std::to_string(manifest.expected_realizations) +
                                      " realizations, found " + std::to_string(split.size()));
            return split;
        });

        for (const auto& r : realizations) {
            stage("ingest", person, r.stroke_index, [&] {
                const auto verdict = validate_realization(r, cfg.validation);
                if (!verdict.ok())
                    throw ValidationError("realization failed validation: " +
                                          verdict.violations.front().message);
                return 0;
            });

            std::array<OrientationTrack, 4> tracks;
            for (SensorId id : kAllSensors) {
                tracks[static_cast<int>(id)] = stage("orientation", person, r.stroke_index, [&] {
                    return estimate_orientation(r.stream(id), cfg.ekf);
                });
                if (cfg.dump_orientation) {
                    const auto dir = cfg.output_dir / "orientation";
                    std::filesystem::create_directories(dir);
                    write_orientation_csv(tracks[static_cast<int>(id)],
                                          dir / (person + "_s" + std::to_string(r.stroke_index) +
                                                 "_" + sensor_name(id) + ".csv"));
                }
            }

            JointAngleTrack track = stage("kinematics", person, r.stroke_index, [&] {
                auto t = joint_angles(tracks);
                t.person_id = person;
                t.stroke_index = r.stroke_index;
                return t;
            });
            JointAngleTrack cycle = stage("kinematics", person, r.stroke_index, [&] {
                return resample_track(track, cfg.cycle_length);
            });

            data.ids.push_back({person, r.stroke_index});
            data.raw_tracks.push_back(std::move(track));
            data.cycle_tracks.push_back(std::move(cycle));
        }
    }
    if (data.ids.empty()) throw StageError("ingest", "", -1, "session contains no realizations");
    return data;
}

Eigen::MatrixXd run_mapping_stages(const PipelineConfig& cfg, const std::vector<PointId>& ids) {
    const SessionManifest manifest =
        stage("geometry", "", -1, [&] { return parse_manifest(cfg.manifest_path); });

    std::map<std::pair<std::string, std::int64_t>, StrokeMeasurement> measurements;
    for (const auto& participant : manifest.participants) {
        const auto list = stage("geometry", participant.person_id, -1, [&] {
            return parse_measurement_file(participant.measurement_file);
        });
        for (const auto& m : list) measurements[{m.person_id, m.stroke_index}] = m;
    }

    Eigen::MatrixXd points(static_cast<Eigen::Index>(ids.size()), 5);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& id = ids[i];
        const auto it = measurements.find({id.person_id, id.stroke_index});
        if (it == measurements.end())
            throw StageError("geometry", id.person_id, id.stroke_index,
                             "no measurement record for this stroke");
        const StrokeParameters params = stage("geometry", id.person_id, id.stroke_index, [&] {
            return extract_parameters(it->second, cfg.table, cfg.video_fps);
        });
        const PerformancePoint point = stage("mapping", id.person_id, id.stroke_index, [&] {
            return map_stroke(params, cfg.cost_specs, cfg.rbf_specs);
        });
        points.row(static_cast<Eigen::Index>(i)) = point.scores.transpose();
    }
    return points;
}

BenchmarkReport run_analysis_stages(const PipelineConfig& cfg, const Eigen::MatrixXd& points,
                                    const std::vector<PointId>& ids,
                                    const std::vector<std::string>& persons,
                                    const MotionData* motion) {
    BenchmarkReport report;
    report.grid = cfg.sweep_grid;
    report.k_max = cfg.k_max;
    report.cycle_length = cfg.cycle_length;
    report.points = points;
    report.ids = ids;
    report.persons = persons;

    std::tie(report.profile, report.sweep) =
        stage("sweep", "", -1, [&] { return sigma_sweep(points, cfg.sweep_grid, cfg.k_max); });

    report.clusters = stage("kmeans", "", -1, [&] {
        return kmeans(points, report.sweep.selected_k, cfg.seed, cfg.kmeans_restarts);
    });
    report.benchmark = stage("benchmark", "", -1, [&] { return select_benchmark(report.clusters); });

    report.composition = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(persons.size()),
                                               report.clusters.k);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto row = std::find(persons.begin(), persons.end(), ids[i].person_id);
        if (row == persons.end())
            throw StageError("benchmark", ids[i].person_id, ids[i].stroke_index,
                             "point person not present in session person list");
        report.composition(static_cast<Eigen::Index>(row - persons.begin()),
                           report.clusters.assignments[i]) += 1;
    }

    if (motion) {
        report.mean_signals = stage("mean_signal", "", -1, [&] {
            std::vector<MeanEulerSignal> signals;
            for (int q = 0; q < report.clusters.k; ++q) {
                std::vector<JointAngleTrack> members;
                for (std::size_t i = 0; i < ids.size(); ++i)
                    if (report.clusters.assignments[i] == q)
                        members.push_back(motion->cycle_tracks[i]);
                if (members.empty())
                    throw ValidationError("cluster " + std::to_string(q) + " is empty");
                MeanEulerSignal signal = mean_euler_signal(members);
                signal.cluster_id = q;
                signals.push_back(std::move(signal));
            }
            return signals;
        });
    }

    if (cfg.subcluster.enabled) {
        report.sub = stage("subcluster", "", -1, [&] {
            SubReport sub;
            sub.parent_cluster = cfg.subcluster.target_cluster;
            if (sub.parent_cluster < 0) {
                // Default target: the cluster farthest from the ideal point.
                sub.parent_cluster = 0;
                for (int q = 1; q < report.clusters.k; ++q)
                    if (report.benchmark.distances[static_cast<std::size_t>(q)] >
                        report.benchmark.distances[static_cast<std::size_t>(sub.parent_cluster)])
                        sub.parent_cluster = q;
            }
            if (sub.parent_cluster >= report.clusters.k)
                throw ConfigError("subcluster target " + std::to_string(sub.parent_cluster) +
                                  " out of range");
            for (std::size_t i = 0; i < ids.size(); ++i)
                if (report.clusters.assignments[i] == sub.parent_cluster)
                    sub.member_rows.push_back(static_cast<int>(i));

            Eigen::MatrixXd subset(static_cast<Eigen::Index>(sub.member_rows.size()), 5);
            for (std::size_t r = 0; r < sub.member_rows.size(); ++r)
                subset.row(static_cast<Eigen::Index>(r)) = points.row(sub.member_rows[r]);

            SubclusterResult result =
                ::strokebench::subcluster(subset, cfg.sweep_grid, cfg.k_max, cfg.seed + 1,
                                          cfg.kmeans_restarts);
            sub.sweep = result.sweep;
            sub.profile = std::move(result.profile);
            sub.model = std::move(result.model);

            if (motion) {
                for (int j = 0; j < sub.model.k; ++j) {
                    std::vector<JointAngleTrack> members;
                    for (std::size_t r = 0; r < sub.member_rows.size(); ++r)
                        if (sub.model.assignments[r] == j)
                            members.push_back(
                                motion->cycle_tracks[static_cast<std::size_t>(sub.member_rows[r])]);
                    if (members.empty())
                        throw ValidationError("subcluster " + std::to_string(j) + " is empty");
                    MeanEulerSignal signal = mean_euler_signal(members);
                    signal.cluster_id = j;
                    sub.mean_signals.push_back(std::move(signal));
                }
            }
            return sub;
        });
    }

    if (cfg.embedding_enabled) {
        report.embedding = stage("embedding", "", -1, [&] {
            TsneConfig tsne_cfg = cfg.tsne;
            tsne_cfg.seed = cfg.seed;
            return tsne_embed(points, tsne_cfg);
        });
    }
    return report;
}

BenchmarkReport run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);

    const MotionData motion = run_motion_stages(cfg);
    const Eigen::MatrixXd points = run_mapping_stages(cfg, motion.ids);
    BenchmarkReport report =
        run_analysis_stages(cfg, points, motion.ids, motion.persons, &motion);

    stage("emit", "", -1, [&] {
        write_points_csv(report.points, report.ids, cfg.output_dir / "points.csv");
        emit_tables(report, cfg.output_dir);
        emit_plots(report, cfg.output_dir);
        save_report(report, cfg.output_dir / "report.json");
        return 0;
    });
    return report;
}

void emit_tables(const BenchmarkReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    {
        auto out = open_out(dir / "centroids.csv");
        out << "cluster_index,c1,c2,c3,c4,c5,distance\n";
        for (int q = 0; q < report.clusters.k; ++q) {
            out << q;
            for (int c = 0; c < 5; ++c) out << ',' << csv_num(report.clusters.centroids(q, c), "%.4f");
            out << ',' << csv_num(report.benchmark.distances[static_cast<std::size_t>(q)], "%.4f")
                << '\n';
        }
    }

    {
        auto out = open_out(dir / "assignments.csv");
        std::map<int, int> sub_of_row;
        if (report.sub)
            for (std::size_t r = 0; r < report.sub->member_rows.size(); ++r)
                sub_of_row[report.sub->member_rows[r]] = report.sub->model.assignments[r];
        out << (report.sub ? "person_id,stroke_index,cluster_id,subcluster_id\n"
                           : "person_id,stroke_index,cluster_id\n");
        for (std::size_t i = 0; i < report.ids.size(); ++i) {
            out << report.ids[i].person_id << ',' << report.ids[i].stroke_index << ','
                << report.clusters.assignments[i];
            if (report.sub) {
                out << ',';
                const auto it = sub_of_row.find(static_cast<int>(i));
                if (it != sub_of_row.end()) out << it->second;
            }
            out << '\n';
        }
    }

    {
        auto out = open_out(dir / "composition.csv");
        out << "person_id";
        for (int q = 0; q < report.clusters.k; ++q) out << ",cluster_" << q;
        out << '\n';
        for (std::size_t p = 0; p < report.persons.size(); ++p) {
            out << report.persons[p];
            for (int q = 0; q < report.clusters.k; ++q)
                out << ',' << report.composition(static_cast<Eigen::Index>(p), q);
            out << '\n';
        }
    }

    for (const auto& signal : report.mean_signals) {
        auto out = open_out(dir / ("mean_signal_cluster" + std::to_string(signal.cluster_id) +
                                   ".csv"));
        out << "k";
        for (const char* name : kEulerChannelNames) out << ',' << name;
        out << '\n';
        for (Eigen::Index k = 0; k < signal.channels.cols(); ++k) {
            out << k;
            for (int w = 0; w < kNumEulerChannels; ++w)
                out << ',' << csv_num(signal.channels(w, k), "%.6f");
            out << '\n';
        }
    }

    if (report.embedding) {
        auto out = open_out(dir / "embedding.csv");
        out << "person_id,stroke_index,cluster_id,tsne_x,tsne_y\n";
        for (std::size_t i = 0; i < report.ids.size(); ++i) {
            out << report.ids[i].person_id << ',' << report.ids[i].stroke_index << ','
                << report.clusters.assignments[i] << ','
                << csv_num(report.embedding->coords(static_cast<Eigen::Index>(i), 0), "%.6f")
                << ','
                << csv_num(report.embedding->coords(static_cast<Eigen::Index>(i), 1), "%.6f")
                << '\n';
        }
    }

    {
        auto out = open_out(dir / "eigengaps.csv");
        out << "sigma";
        for (int k = 1; k <= report.k_max; ++k) out << ",gap_" << k;
        out << '\n';
        for (std::size_t i = 0; i < report.profile.sigma_grid.size(); ++i) {
            const auto& gaps = report.profile.gaps[i];
            if (gaps.empty()) continue;  // degenerate sigma, skipped
            out << csv_num(report.profile.sigma_grid[i]);
            for (int k = 1; k <= report.k_max; ++k)
                out << ',' << csv_num(gaps[static_cast<std::size_t>(k - 1)]);
            out << '\n';
        }
    }

    if (report.sub) {
        const auto& sub = *report.sub;
        auto out = open_out(dir / "sub_centroids.csv");
        out << "subcluster_index,c1,c2,c3,c4,c5,distance\n";
        for (int q = 0; q < sub.model.k; ++q) {
            out << q;
            for (int c = 0; c < 5; ++c) out << ',' << csv_num(sub.model.centroids(q, c), "%.4f");
            out << ',' << csv_num(distance_to_ideal(sub.model.centroids.row(q)), "%.4f") << '\n';
        }
        for (const auto& signal : sub.mean_signals) {
            auto sout = open_out(dir / ("mean_signal_sub" + std::to_string(signal.cluster_id) +
                                        ".csv"));
            sout << "k";
            for (const char* name : kEulerChannelNames) sout << ',' << name;
            sout << '\n';
            for (Eigen::Index k = 0; k < signal.channels.cols(); ++k) {
                sout << k;
                for (int w = 0; w < kNumEulerChannels; ++w)
                    sout << ',' << csv_num(signal.channels(w, k), "%.6f");
                sout << '\n';
            }
        }
    }
}

namespace {

void plot_eigengaps(const EigengapProfile& profile, int k_max,
                    const std::filesystem::path& path, const std::string& title) {
    SvgDocument svg(640, 420);
    PlotAxes axes;
    axes.left = 60;
    axes.top = 40;
    axes.plot_width = 440;
    axes.plot_height = 320;

    double x_min = 0.0, x_max = 1.0, y_max = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < profile.sigma_grid.size(); ++i) {
        if (profile.gaps[i].empty()) continue;
        const double lx = std::log10(profile.sigma_grid[i]);
        if (!any) {
            x_min = x_max = lx;
            any = true;
        }
        x_min = std::min(x_min, lx);
        x_max = std::max(x_max, lx);
        for (int k = 1; k <= k_max; ++k)
            y_max = std::max(y_max, profile.gaps[i][static_cast<std::size_t>(k - 1)]);
    }
    if (!any || x_max == x_min) { x_min = -1.0; x_max = 1.0; }
    if (y_max <= 0.0) y_max = 1.0;
    axes.x_min = x_min;
    axes.x_max = x_max;
    axes.y_min = 0.0;
    axes.y_max = y_max * 1.05;

    svg.rect(axes.left, axes.top, axes.plot_width, axes.plot_height, "none", "#888888");
    svg.text(axes.left + axes.plot_width / 2, 20, title, 13, "middle");
    svg.text(axes.left + axes.plot_width / 2, axes.top + axes.plot_height + 32, "log10(sigma)",
             11, "middle");
    svg.text(16, axes.top + axes.plot_height / 2, "eigengap", 11, "middle");

    for (int k = 1; k <= k_max; ++k) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < profile.sigma_grid.size(); ++i) {
            if (profile.gaps[i].empty()) continue;
            pts.emplace_back(axes.px(std::log10(profile.sigma_grid[i])),
                             axes.py(profile.gaps[i][static_cast<std::size_t>(k - 1)]));
        }
        if (!pts.empty()) svg.polyline(pts, cluster_color(k - 1));
        const double ly = axes.top + 14.0 * k;
        svg.line(axes.left + axes.plot_width + 10, ly, axes.left + axes.plot_width + 30, ly,
                 cluster_color(k - 1), 2.0);
        svg.text(axes.left + axes.plot_width + 34, ly + 4, "gap " + std::to_string(k), 10);
    }
    svg.save(path);
}

void plot_scatter(const Eigen::MatrixXd& coords, const std::vector<int>& labels, int k,
                  const std::filesystem::path& path, const std::string& title) {
    SvgDocument svg(560, 460);
    PlotAxes axes;
    axes.left = 40;
    axes.top = 40;
    axes.plot_width = 400;
    axes.plot_height = 380;
    axes.x_min = coords.col(0).minCoeff();
    axes.x_max = coords.col(0).maxCoeff();
    axes.y_min = coords.col(1).minCoeff();
    axes.y_max = coords.col(1).maxCoeff();
    const double pad_x = std::max(1e-9, 0.05 * (axes.x_max - axes.x_min));
    const double pad_y = std::max(1e-9, 0.05 * (axes.y_max - axes.y_min));
    axes.x_min -= pad_x; axes.x_max += pad_x;
    axes.y_min -= pad_y; axes.y_max += pad_y;

    svg.rect(axes.left, axes.top, axes.plot_width, axes.plot_height, "none", "#888888");
    svg.text(axes.left + axes.plot_width / 2, 20, title, 13, "middle");
    for (Eigen::Index i = 0; i < coords.rows(); ++i)
        svg.circle(axes.px(coords(i, 0)), axes.py(coords(i, 1)), 3.5,
                   cluster_color(labels[static_cast<std::size_t>(i)]));
    for (int q = 0; q < k; ++q) {
        const double ly = axes.top + 16.0 * (q + 1);
        svg.circle(axes.left + axes.plot_width + 14, ly, 4, cluster_color(q));
        svg.text(axes.left + axes.plot_width + 24, ly + 4, "cluster " + std::to_string(q), 10);
    }
    svg.save(path);
}

void plot_composition(const BenchmarkReport& report, const std::filesystem::path& path) {
    const auto n_persons = static_cast<int>(report.persons.size());
    const int k = report.clusters.k;
    SvgDocument svg(std::max(520.0, 80.0 + 60.0 * n_persons), 420);
    const double left = 60, top = 40, bar_width = 36, gap = 24, plot_height = 300;

    int max_count = 1;
    for (Eigen::Index p = 0; p < report.composition.rows(); ++p)
        max_count = std::max(max_count, static_cast<int>(report.composition.row(p).sum()));

    svg.text(left + (bar_width + gap) * n_persons / 2.0, 20, "Cluster composition per individual",
             13, "middle");
    for (int p = 0; p < n_persons; ++p) {
        const double x = left + p * (bar_width + gap);
        double y = top + plot_height;
        for (int q = 0; q < k; ++q) {
            const double h = plot_height * report.composition(p, q) / static_cast<double>(max_count);
            if (h <= 0.0) continue;
            y -= h;
            svg.rect(x, y, bar_width, h, cluster_color(q), "#ffffff");
        }
        svg.text(x + bar_width / 2, top + plot_height + 16, report.persons[static_cast<std::size_t>(p)],
                 10, "middle");
    }
    for (int q = 0; q < k; ++q) {
        const double ly = top + 16.0 * (q + 1);
        const double lx = left + (bar_width + gap) * n_persons + 10;
        svg.rect(lx, ly - 8, 12, 12, cluster_color(q), "none");
        svg.text(lx + 18, ly + 2, "cluster " + std::to_string(q), 10);
    }
    svg.save(path);
}

// One 3x3 grid; each panel overlays one curve per listed signal.
void plot_mean_signal_grid(const std::vector<const MeanEulerSignal*>& signals,
                           const std::vector<std::string>& labels,
                           const std::filesystem::path& path, const std::string& title) {
    const double panel_w = 200, panel_h = 130, margin = 46, spacing = 26;
    SvgDocument svg(margin * 2 + panel_w * 3 + spacing * 2,
                    margin * 2 + panel_h * 3 + spacing * 2 + 20);
    svg.text(margin + (panel_w * 3 + spacing * 2) / 2, 22, title, 13, "middle");

    for (int w = 0; w < kNumEulerChannels; ++w) {
        const int row = w / 3, col = w % 3;
        PlotAxes axes;
        axes.left = margin + col * (panel_w + spacing);
        axes.top = margin + row * (panel_h + spacing);
        axes.plot_width = panel_w;
        axes.plot_height = panel_h;

        double y_min = 0.0, y_max = 0.0;
        bool first = true;
        for (const auto* s : signals) {
            for (Eigen::Index k = 0; k < s->channels.cols(); ++k) {
                const double v = s->channels(w, k);
                if (first) { y_min = y_max = v; first = false; }
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        }
        if (y_max - y_min < 1e-9) { y_max += 1.0; y_min -= 1.0; }
        axes.y_min = y_min - 0.05 * (y_max - y_min);
        axes.y_max = y_max + 0.05 * (y_max - y_min);
        axes.x_min = 0.0;

        svg.rect(axes.left, axes.top, panel_w, panel_h, "none", "#888888");
        svg.text(axes.left + panel_w / 2, axes.top - 6, kEulerChannelNames[w], 10, "middle");
        for (std::size_t s = 0; s < signals.size(); ++s) {
            const auto& channels = signals[s]->channels;
            axes.x_max = static_cast<double>(channels.cols() - 1);
            std::vector<std::pair<double, double>> pts;
            pts.reserve(static_cast<std::size_t>(channels.cols()));
            for (Eigen::Index k = 0; k < channels.cols(); ++k)
                pts.emplace_back(axes.px(static_cast<double>(k)), axes.py(channels(w, k)));
            svg.polyline(pts, cluster_color(static_cast<int>(s)), 1.2);
        }
    }
    for (std::size_t s = 0; s < labels.size(); ++s) {
        const double ly = margin + panel_h * 3 + spacing * 2 + 18;
        const double lx = margin + 140.0 * s;
        svg.line(lx, ly, lx + 22, ly, cluster_color(static_cast<int>(s)), 2.0);
        svg.text(lx + 28, ly + 4, labels[s], 10);
    }
    svg.save(path);
}

}  // namespace

void emit_plots(const BenchmarkReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    plot_eigengaps(report.profile, report.k_max, dir / "eigengaps.svg",
                   "Eigengaps vs log10(sigma)");

    if (report.embedding)
        plot_scatter(report.embedding->coords, report.clusters.assignments, report.clusters.k,
                     dir / "embedding.svg", "t-SNE embedding of the performance space");

    plot_composition(report, dir / "composition.svg");

    for (const auto& signal : report.mean_signals) {
        std::vector<const MeanEulerSignal*> one{&signal};
        plot_mean_signal_grid(one, {"cluster " + std::to_string(signal.cluster_id)},
                              dir / ("mean_signals_cluster" + std::to_string(signal.cluster_id) +
                                     ".svg"),
                              "Mean Euler signals, cluster " + std::to_string(signal.cluster_id));
    }
    if (!report.mean_signals.empty()) {
        std::vector<const MeanEulerSignal*> all;
        std::vector<std::string> labels;
        for (const auto& signal : report.mean_signals) {
            all.push_back(&signal);
            labels.push_back("cluster " + std::to_string(signal.cluster_id));
        }
        plot_mean_signal_grid(all, labels, dir / "mean_signals_all.svg",
                              "Mean Euler signals, all clusters");
    }

    if (report.sub) {
        const auto& sub = *report.sub;
        plot_eigengaps(sub.profile, std::min<int>(report.k_max,
                                                  static_cast<int>(sub.member_rows.size()) - 1),
                       dir / "sub_eigengaps.svg",
                       "Sub-cluster eigengaps (cluster " + std::to_string(sub.parent_cluster) +
                           ")");
        if (report.embedding) {
            Eigen::MatrixXd coords(static_cast<Eigen::Index>(sub.member_rows.size()), 2);
            for (std::size_t r = 0; r < sub.member_rows.size(); ++r)
                coords.row(static_cast<Eigen::Index>(r)) =
                    report.embedding->coords.row(sub.member_rows[r]);
            plot_scatter(coords, sub.model.assignments, sub.model.k, dir / "sub_embedding.svg",
                         "Sub-clusters of cluster " + std::to_string(sub.parent_cluster));
        }
        if (!sub.mean_signals.empty() && !report.mean_signals.empty()) {
            std::vector<const MeanEulerSignal*> overlay;
            std::vector<std::string> labels;
            overlay.push_back(&report.mean_signals[static_cast<std::size_t>(
                report.benchmark.benchmark_index)]);
            labels.push_back("benchmark");
            overlay.push_back(
                &report.mean_signals[static_cast<std::size_t>(sub.parent_cluster)]);
            labels.push_back("cluster " + std::to_string(sub.parent_cluster));
            for (const auto& signal : sub.mean_signals) {
                overlay.push_back(&signal);
                labels.push_back("sub " + std::to_string(signal.cluster_id));
            }
            plot_mean_signal_grid(overlay, labels, dir / "sub_mean_signals.svg",
                                  "Benchmark vs cluster " + std::to_string(sub.parent_cluster) +
                                      " sub-clusters");
        }
    }
}

void write_points_csv(const Eigen::MatrixXd& points, const std::vector<PointId>& ids,
                      const std::filesystem::path& path) {
    if (points.rows() != static_cast<Eigen::Index>(ids.size()))
        throw ValidationError("points/ids size mismatch");
    auto out = open_out(path);
    out << "person_id,stroke_index,s1,s2,s3,s4,s5\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i].person_id << ',' << ids[i].stroke_index;
        for (int c = 0; c < 5; ++c)
            out << ',' << csv_num(points(static_cast<Eigen::Index>(i), c), "%.17g");
        out << '\n';
    }
}

std::pair<Eigen::MatrixXd, std::vector<PointId>> read_points_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open points file " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty points file", path.string(), 1);

    std::vector<PointId> ids;
    std::vector<std::array<double, 5>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            throw ParseError("expected 7 fields", path.string(), line_no);
        PointId id;
        id.person_id = fields[0];
        std::array<double, 5> row{};
        try {
            id.stroke_index = std::stoll(fields[1]);
            for (int c = 0; c < 5; ++c) row[static_cast<std::size_t>(c)] = std::stod(fields[2 + c]);
        } catch (const std::exception&) {
            throw ParseError("non-numeric field", path.string(), line_no);
        }
        ids.push_back(std::move(id));
        rows.push_back(row);
    }
    Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), 5);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int c = 0; c < 5; ++c)
            points(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
    return {points, ids};
}

void write_joint_track_csv(const JointAngleTrack& track, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "k";
    for (const char* name : kEulerChannelNames) out << ',' << name;
    out << '\n';
    for (std::size_t k = 0; k < track.size(); ++k) {
        out << k;
        for (int w = 0; w < kNumEulerChannels; ++w)
            out << ',' << csv_num(track.frames[k].channel(w), "%.6f");
        out << '\n';
    }
}

void write_orientation_csv(const OrientationTrack& track, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "index,qx,qy,qz,qw,bx,by,bz\n";
    for (std::size_t i = 0; i < track.size(); ++i) {
        const Quaternion& q = track.quats[i];
        const Eigen::Vector3d& b = track.biases[i];
        out << i << ',' << csv_num(q.x, "%.9f") << ',' << csv_num(q.y, "%.9f") << ','
            << csv_num(q.z, "%.9f") << ',' << csv_num(q.w, "%.9f") << ','
            << csv_num(b.x(), "%.9f") << ',' << csv_num(b.y(), "%.9f") << ','
            << csv_num(b.z(), "%.9f") << '\n';
    }
}

namespace {

json eigen_matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd eigen_matrix_from_json(const json& j, Eigen::Index cols_hint = -1) {
    const auto n_rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index n_cols = cols_hint;
    if (n_rows > 0) n_cols = static_cast<Eigen::Index>(j.at(0).size());
    if (n_cols < 0) n_cols = 0;
    Eigen::MatrixXd m(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r)
        for (Eigen::Index c = 0; c < n_cols; ++c)
            m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c))
                          .get<double>();
    return m;
}

json profile_to_json(const EigengapProfile& profile, int k_max) {
    json j;
    j["sigma_grid"] = profile.sigma_grid;
    j["skipped"] = profile.skipped;
    json gaps = json::array();
    for (const auto& row : profile.gaps) {
        json jr = json::array();
        const std::size_t keep = std::min<std::size_t>(row.size(), static_cast<std::size_t>(k_max));
        for (std::size_t k = 0; k < keep; ++k) jr.push_back(row[k]);
        gaps.push_back(std::move(jr));
    }
    j["gaps"] = gaps;
    return j;
}

EigengapProfile profile_from_json(const json& j) {
    EigengapProfile profile;
    profile.sigma_grid = j.at("sigma_grid").get<std::vector<double>>();
    profile.skipped = j.at("skipped").get<std::vector<int>>();
    for (const auto& row : j.at("gaps"))
        profile.gaps.push_back(row.get<std::vector<double>>());
    profile.eigenvalues.resize(profile.sigma_grid.size());
    return profile;
}

json cluster_model_to_json(const ClusterModel& model) {
    json j;
    j["k"] = model.k;
    j["assignments"] = model.assignments;
    j["centroids"] = eigen_matrix_to_json(model.centroids);
    j["inertia"] = model.inertia;
    j["seed"] = model.seed;
    return j;
}

ClusterModel cluster_model_from_json(const json& j) {
    ClusterModel model;
    model.k = j.at("k").get<int>();
    model.assignments = j.at("assignments").get<std::vector<int>>();
    model.centroids = eigen_matrix_from_json(j.at("centroids"), 5);
    model.inertia = j.at("inertia").get<double>();
    model.seed = j.at("seed").get<std::uint64_t>();
    return model;
}

json sweep_to_json(const SigmaSweepResult& sweep) {
    json j;
    j["selected_k"] = sweep.selected_k;
    j["fallback"] = sweep.fallback;
    json dom = json::object();
    for (const auto& [k, measure] : sweep.dominance) dom[std::to_string(k)] = measure;
    j["dominance"] = dom;
    return j;
}

SigmaSweepResult sweep_from_json(const json& j) {
    SigmaSweepResult sweep;
    sweep.selected_k = j.at("selected_k").get<int>();
    sweep.fallback = j.at("fallback").get<bool>();
    for (const auto& [key, value] : j.at("dominance").items())
        sweep.dominance[std::stoi(key)] = value.get<double>();
    return sweep;
}

json mean_signal_to_json(const MeanEulerSignal& signal) {
    json j;
    j["cluster_id"] = signal.cluster_id;
    j["n_q"] = signal.n_q;
    j["channels"] = eigen_matrix_to_json(signal.channels);
    return j;
}

MeanEulerSignal mean_signal_from_json(const json& j) {
    MeanEulerSignal signal;
    signal.cluster_id = j.at("cluster_id").get<int>();
    signal.n_q = j.at("n_q").get<std::size_t>();
    signal.channels = eigen_matrix_from_json(j.at("channels"));
    return signal;
}

}  // namespace

void save_report(const BenchmarkReport& report, const std::filesystem::path& path) {
    json j;
    j["grid"] = {{"log10_min", report.grid.log10_min},
                 {"log10_max", report.grid.log10_max},
                 {"count", report.grid.count}};
    j["k_max"] = report.k_max;
    j["cycle_length"] = report.cycle_length;
    j["profile"] = profile_to_json(report.profile, report.k_max);
    j["sweep"] = sweep_to_json(report.sweep);
    j["points"] = eigen_matrix_to_json(report.points);
    json ids = json::array();
    for (const auto& id : report.ids)
        ids.push_back({{"person_id", id.person_id}, {"stroke_index", id.stroke_index}});
    j["ids"] = ids;
    j["persons"] = report.persons;
    j["clusters"] = cluster_model_to_json(report.clusters);
    j["benchmark"] = {{"distances", report.benchmark.distances},
                      {"benchmark_index", report.benchmark.benchmark_index}};
    json comp = json::array();
    for (Eigen::Index p = 0; p < report.composition.rows(); ++p) {
        json row = json::array();
        for (Eigen::Index q = 0; q < report.composition.cols(); ++q)
            row.push_back(report.composition(p, q));
        comp.push_back(std::move(row));
    }
    j["composition"] = comp;
    json signals = json::array();
    for (const auto& s : report.mean_signals) signals.push_back(mean_signal_to_json(s));
    j["mean_signals"] = signals;
    if (report.sub) {
        const auto& sub = *report.sub;
        json sj;
        sj["parent_cluster"] = sub.parent_cluster;
        sj["member_rows"] = sub.member_rows;
        sj["sweep"] = sweep_to_json(sub.sweep);
        sj["profile"] = profile_to_json(sub.profile, report.k_max);
        sj["model"] = cluster_model_to_json(sub.model);
        json sub_signals = json::array();
        for (const auto& s : sub.mean_signals) sub_signals.push_back(mean_signal_to_json(s));
        sj["mean_signals"] = sub_signals;
        j["sub"] = sj;
    }
    if (report.embedding) {
        j["embedding"] = {{"coords", eigen_matrix_to_json(report.embedding->coords)},
                          {"final_kl", report.embedding->final_kl}};
    }

    auto out = open_out(path);
    out << j.dump(1) << '\n';
}

BenchmarkReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad report JSON: ") + e.what(), path.string());
    }

    BenchmarkReport report;
    try {
        report.grid.log10_min = j.at("grid").at("log10_min").get<double>();
        report.grid.log10_max = j.at("grid").at("log10_max").get<double>();
        report.grid.count = j.at("grid").at("count").get<int>();
        report.k_max = j.at("k_max").get<int>();
        report.cycle_length = j.at("cycle_length").get<std::size_t>();
        report.profile = profile_from_json(j.at("profile"));
        report.sweep = sweep_from_json(j.at("sweep"));
        report.points = eigen_matrix_from_json(j.at("points"), 5);
        for (const auto& idj : j.at("ids"))
            report.ids.push_back({idj.at("person_id").get<std::string>(),
                                  idj.at("stroke_index").get<std::int64_t>()});
        report.persons = j.at("persons").get<std::vector<std::string>>();
        report.clusters = cluster_model_from_json(j.at("clusters"));
        report.benchmark.distances = j.at("benchmark").at("distances").get<std::vector<double>>();
        report.benchmark.benchmark_index = j.at("benchmark").at("benchmark_index").get<int>();
        const auto& comp = j.at("composition");
        report.composition = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(comp.size()),
                                                   report.clusters.k);
        for (Eigen::Index p = 0; p < report.composition.rows(); ++p)
            for (Eigen::Index q = 0; q < report.composition.cols(); ++q)
                report.composition(p, q) = comp.at(static_cast<std::size_t>(p))
                                               .at(static_cast<std::size_t>(q))
                                               .get<int>();
        for (const auto& s : j.at("mean_signals"))
            report.mean_signals.push_back(mean_signal_from_json(s));
        if (j.contains("sub")) {
            SubReport sub;
            const auto& sj = j.at("sub");
            sub.parent_cluster = sj.at("parent_cluster").get<int>();
            sub.member_rows = sj.at("member_rows").get<std::vector<int>>();
            sub.sweep = sweep_from_json(sj.at("sweep"));
            sub.profile = profile_from_json(sj.at("profile"));
            sub.model = cluster_model_from_json(sj.at("model"));
            for (const auto& s : sj.at("mean_signals"))
                sub.mean_signals.push_back(mean_signal_from_json(s));
            report.sub = std::move(sub);
        }
        if (j.contains("embedding")) {
            Embedding2D embedding;
            embedding.coords = eigen_matrix_from_json(j.at("embedding").at("coords"), 2);
            embedding.final_kl = j.at("embedding").at("final_kl").get<double>();
            report.embedding = std::move(embedding);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad report schema: ") + e.what(), path.string());
    }
    return report;
}

}  // namespace strokebench
