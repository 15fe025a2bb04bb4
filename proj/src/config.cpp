#include "strokebench/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "strokebench/errors.hpp"

namespace strokebench {

using nlohmann::json;

void PipelineConfig::validate() const {
    if (manifest_path.empty()) throw ConfigError("config must name a manifest");
    if (!(sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be positive");
    if (cycle_length < 2) throw ConfigError("cycle_length must be at least 2");
    if (!(video_fps > 0.0)) throw ConfigError("video_fps must be positive");
    if (k_max < 3) throw ConfigError("k_max must be at least 3");
    if (kmeans_restarts < 1) throw ConfigError("kmeans_restarts must be at least 1");
    ekf.validate();
    sweep_grid.validate();
    tsne.validate();
    for (const auto& s : cost_specs) s.validate();
    for (const auto& s : rbf_specs) s.validate();
}

namespace {

void read_ekf(const json& j, EkfConfig& cfg) {
    cfg.gyro_noise_density = j.value("gyro_noise_density", cfg.gyro_noise_density);
    cfg.bias_random_walk = j.value("bias_random_walk", cfg.bias_random_walk);
    cfg.accel_noise_std = j.value("accel_noise_std", cfg.accel_noise_std);
    cfg.gravity_magnitude = j.value("gravity_magnitude", cfg.gravity_magnitude);
    cfg.accel_gate = j.value("accel_gate", cfg.accel_gate);
    cfg.initial_attitude_std = j.value("initial_attitude_std", cfg.initial_attitude_std);
    cfg.initial_bias_std = j.value("initial_bias_std", cfg.initial_bias_std);
}

CostFunctionSpec read_cost_spec(const json& j) {
    CostFunctionSpec spec;
    const std::string pid = j.at("parameter").get<std::string>();
    if (pid.size() != 2 || pid[0] != 'p' || pid[1] < '1' || pid[1] > '5')
        throw ConfigError("cost function parameter must be p1..p5, got '" + pid + "'");
    spec.parameter_id = pid[1] - '1';
    spec.kind = cost_kind_from_name(j.at("kind").get<std::string>());
    if (spec.kind == CostKind::TargetDeviation) {
        spec.target = j.at("target").get<double>();
        spec.slope = j.at("slope").get<double>();
    } else {
        for (const auto& knot : j.at("knots"))
            spec.knots.emplace_back(knot.at(0).get<double>(), knot.at(1).get<double>());
    }
    spec.validate();
    return spec;
}

RbfSpec read_rbf_spec(const json& j) {
    RbfSpec spec;
    const std::string pid = j.at("parameter").get<std::string>();
    if (pid.size() != 2 || pid[0] != 'p' || pid[1] < '1' || pid[1] > '5')
        throw ConfigError("rbf parameter must be p1..p5, got '" + pid + "'");
    spec.parameter_id = pid[1] - '1';
    spec.alpha = j.at("alpha").get<double>();
    spec.mu = j.value("mu", 0.0);
    if (j.contains("psi0") && j.at("psi0").get<double>() != 1.0)
        throw ConfigError("psi0 is fixed at 1");
    spec.validate();
    return spec;
}

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad config JSON: ") + e.what(), path.string());
    }

    const auto base = path.parent_path();
    auto resolve = [&base](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    PipelineConfig cfg;
    try {
        cfg.manifest_path = resolve(j.at("manifest").get<std::string>());
        if (j.contains("scale")) {
            const auto& sj = j.at("scale");
            if (sj.is_string()) {
                const auto name = sj.get<std::string>();
                if (name == "mpu6050")
                    cfg.scale = ScaleSpec::mpu6050();
                else if (name == "identity")
                    cfg.scale = ScaleSpec::identity();
                else
                    throw ConfigError("unknown scale preset '" + name + "'");
            } else {
                cfg.scale.accel_to_mps2 = sj.at("accel_to_mps2").get<double>();
                cfg.scale.gyro_to_radps = sj.at("gyro_to_radps").get<double>();
            }
        }
        cfg.sample_rate_hz = j.value("sample_rate_hz", cfg.sample_rate_hz);
        if (j.contains("ekf")) read_ekf(j.at("ekf"), cfg.ekf);
        if (j.contains("validation")) {
            const auto& vj = j.at("validation");
            cfg.validation.min_length = vj.value("min_length", cfg.validation.min_length);
            cfg.validation.max_length = vj.value("max_length", cfg.validation.max_length);
            cfg.validation.gyro_saturation_radps =
                vj.value("gyro_saturation_radps", cfg.validation.gyro_saturation_radps);
        }
        cfg.cycle_length = j.value("cycle_length", cfg.cycle_length);
        cfg.video_fps = j.value("video_fps", cfg.video_fps);
        if (j.contains("cost_functions")) {
            std::array<bool, 5> seen{};
            for (const auto& cj : j.at("cost_functions")) {
                CostFunctionSpec spec = read_cost_spec(cj);
                if (seen[static_cast<std::size_t>(spec.parameter_id)])
                    throw ConfigError("duplicate cost function for p" +
                                      std::to_string(spec.parameter_id + 1));
                seen[static_cast<std::size_t>(spec.parameter_id)] = true;
                cfg.cost_specs[static_cast<std::size_t>(spec.parameter_id)] = std::move(spec);
            }
        }
        if (j.contains("rbf")) {
            for (const auto& rj : j.at("rbf")) {
                RbfSpec spec = read_rbf_spec(rj);
                cfg.rbf_specs[static_cast<std::size_t>(spec.parameter_id)] = spec;
            }
        }
        if (j.contains("sweep")) {
            const auto& sj = j.at("sweep");
            cfg.sweep_grid.log10_min = sj.value("log10_min", cfg.sweep_grid.log10_min);
            cfg.sweep_grid.log10_max = sj.value("log10_max", cfg.sweep_grid.log10_max);
            cfg.sweep_grid.count = sj.value("count", cfg.sweep_grid.count);
            cfg.k_max = sj.value("k_max", cfg.k_max);
        }
        if (j.contains("kmeans")) {
            const auto& kj = j.at("kmeans");
            cfg.seed = kj.value("seed", cfg.seed);
            cfg.kmeans_restarts = kj.value("restarts", cfg.kmeans_restarts);
        }
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("tsne")) {
            const auto& tj = j.at("tsne");
            cfg.tsne.perplexity = tj.value("perplexity", cfg.tsne.perplexity);
            cfg.tsne.iterations = tj.value("iterations", cfg.tsne.iterations);
            cfg.tsne.learning_rate = tj.value("learning_rate", cfg.tsne.learning_rate);
            cfg.tsne.early_exaggeration =
                tj.value("early_exaggeration", cfg.tsne.early_exaggeration);
            cfg.tsne.exaggeration_iters =
                tj.value("exaggeration_iters", cfg.tsne.exaggeration_iters);
            cfg.embedding_enabled = tj.value("enabled", cfg.embedding_enabled);
        }
        if (j.contains("subcluster")) {
            const auto& sj = j.at("subcluster");
            cfg.subcluster.enabled = sj.value("enabled", cfg.subcluster.enabled);
            cfg.subcluster.target_cluster = sj.value("target_cluster", cfg.subcluster.target_cluster);
        }
        if (j.contains("output_dir")) cfg.output_dir = resolve(j.at("output_dir").get<std::string>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad config schema: ") + e.what(), path.string());
    }
    cfg.tsne.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

}  // namespace strokebench
