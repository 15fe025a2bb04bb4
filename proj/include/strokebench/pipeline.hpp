#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strokebench/cluster.hpp"
#include "strokebench/config.hpp"
#include "strokebench/kinematics.hpp"
#include "strokebench/tsne.hpp"

namespace strokebench {

struct PointId {
    std::string person_id;
    std::int64_t stroke_index = 0;
};

// Products of the motion half of the pipeline (ingest -> EKF -> joint
// angles -> resample), one entry per realization.
struct MotionData {
    std::vector<PointId> ids;
    std::vector<std::string> persons;            // manifest order
    std::vector<JointAngleTrack> raw_tracks;     // original stroke lengths
    std::vector<JointAngleTrack> cycle_tracks;   // resampled to cycle_length
};

struct SubReport {
    int parent_cluster = 0;
    std::vector<int> member_rows;  // indices into the main point list
    SigmaSweepResult sweep;
    EigengapProfile profile;
    ClusterModel model;
    std::vector<MeanEulerSignal> mean_signals;  // per subcluster; empty without motion data
};

struct BenchmarkReport {
    SweepGrid grid;
    int k_max = 10;
    std::size_t cycle_length = 101;

    EigengapProfile profile;
    SigmaSweepResult sweep;

    Eigen::MatrixXd points;  // n x 5
    std::vector<PointId> ids;
    std::vector<std::string> persons;

    ClusterModel clusters;
    BenchmarkSelection benchmark;
    Eigen::MatrixXi composition;  // persons x k

    std::vector<MeanEulerSignal> mean_signals;  // per cluster; empty without motion data
    std::optional<SubReport> sub;
    std::optional<Embedding2D> embedding;
};

// Runs ingest -> EKF -> joint angles -> resample. Writes orientation debug
// CSVs under <out>/orientation when requested by the config.
MotionData run_motion_stages(const PipelineConfig& cfg);

// Reads the per-person measurement files and maps every stroke into the
// performance space; rows align with ids.
Eigen::MatrixXd run_mapping_stages(const PipelineConfig& cfg, const std::vector<PointId>& ids);

// Clustering / benchmark / mean-signal / embedding stages on prepared data.
// motion may be null (e.g. the `cluster` subcommand), disabling mean signals.
BenchmarkReport run_analysis_stages(const PipelineConfig& cfg, const Eigen::MatrixXd& points,
                                    const std::vector<PointId>& ids,
                                    const std::vector<std::string>& persons,
                                    const MotionData* motion);

// Full pipeline; writes every artifact into cfg.output_dir.
BenchmarkReport run_pipeline(const PipelineConfig& cfg);

// Comma-separated artifact emission (centroids, assignments, composition,
// mean signals, embedding, eigengaps).
void emit_tables(const BenchmarkReport& report, const std::filesystem::path& dir);

// Static SVG plots (eigengap curves, 2D scatter, composition bars, 9-panel
// mean-signal grids).
void emit_plots(const BenchmarkReport& report, const std::filesystem::path& dir);

void save_report(const BenchmarkReport& report, const std::filesystem::path& path);
BenchmarkReport load_report(const std::filesystem::path& path);

// Mapped performance points as `person_id,stroke_index,s1..s5` CSV.
void write_points_csv(const Eigen::MatrixXd& points, const std::vector<PointId>& ids,
                      const std::filesystem::path& path);
std::pair<Eigen::MatrixXd, std::vector<PointId>> read_points_csv(
    const std::filesystem::path& path);

void write_joint_track_csv(const JointAngleTrack& track, const std::filesystem::path& path);
void write_orientation_csv(const OrientationTrack& track, const std::filesystem::path& path);

}  // namespace strokebench
