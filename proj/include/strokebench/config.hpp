#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "strokebench/cluster.hpp"
#include "strokebench/ekf.hpp"
#include "strokebench/geometry.hpp"
#include "strokebench/ingest.hpp"
#include "strokebench/performance.hpp"
#include "strokebench/tsne.hpp"

namespace strokebench {

struct SubclusterConfig {
    bool enabled = false;
    // -1 = drill into the cluster farthest from the ideal point.
    int target_cluster = -1;
};

struct PipelineConfig {
    std::filesystem::path manifest_path;
    ScaleSpec scale = ScaleSpec::mpu6050();
    double sample_rate_hz = 64.0;
    EkfConfig ekf;
    ValidationSpec validation;
    std::size_t cycle_length = 101;
    TableDims table;
    double video_fps = 60.0;
    std::array<CostFunctionSpec, 5> cost_specs = default_cost_specs();
    std::array<RbfSpec, 5> rbf_specs = default_rbf_specs();
    SweepGrid sweep_grid;
    int k_max = 10;
    std::uint64_t seed = 1;
    int kmeans_restarts = 50;
    TsneConfig tsne;
    bool embedding_enabled = true;
    SubclusterConfig subcluster;
    std::filesystem::path output_dir = "out";
    bool dump_orientation = false;

    void validate() const;
};

// Loads the config JSON; unspecified fields keep their defaults. Relative
// paths are resolved against the config file's directory.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace strokebench
