#include "fixture_gen.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strokebench/errors.hpp"
#include "strokebench/ingest.hpp"
#include "strokebench/quaternion.hpp"
#include "strokebench/rng.hpp"
#include "synthetic.hpp"

namespace strokebench::testsupport {

using nlohmann::json;

namespace {

constexpr double kRate = 64.0;
constexpr double kDegToRad = M_PI / 180.0;

// Per-sensor swing amplitudes (yaw, pitch, roll) in degrees.
struct Style {
    std::array<Eigen::Vector3d, 4> amplitude;  // indexed by SensorId
    double phase;                              // forearm/wrist lag, fraction of cycle
};

// Raw stroke-quality targets a group of strokes scatters around.
struct QualityTarget {
    double bounce_x, bounce_y, clearance, speed, height_ratio;
};

Quaternion segment_orientation(const Eigen::Vector3d& amplitude_deg, double tau, double lag) {
    const double t = std::clamp(tau - lag, 0.0, 1.0);
    const double bump = std::sin(M_PI * t) * std::sin(M_PI * t);
    return Quaternion::from_euler_zyx(amplitude_deg.x() * bump * kDegToRad,
                                      amplitude_deg.y() * bump * kDegToRad,
                                      amplitude_deg.z() * bump * kDegToRad);
}

void write_counts_csv(const std::filesystem::path& path, const SensorStream& stream,
                      const ScaleSpec& scale) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write fixture file " + path.string());
    out << "index,ax,ay,az,gx,gy,gz\n";
    auto clamp16 = [](double v) {
        return std::max(-32768.0, std::min(32767.0, std::round(v)));
    };
    char buf[160];
    for (const auto& s : stream.samples) {
        std::snprintf(buf, sizeof(buf), "%lld,%d,%d,%d,%d,%d,%d\n",
                      static_cast<long long>(s.index),
                      static_cast<int>(clamp16(s.accel.x() / scale.accel_to_mps2)),
                      static_cast<int>(clamp16(s.accel.y() / scale.accel_to_mps2)),
                      static_cast<int>(clamp16(s.accel.z() / scale.accel_to_mps2)),
                      static_cast<int>(clamp16(s.gyro.x() / scale.gyro_to_radps)),
                      static_cast<int>(clamp16(s.gyro.y() / scale.gyro_to_radps)),
                      static_cast<int>(clamp16(s.gyro.z() / scale.gyro_to_radps)));
        out << buf;
    }
}

json measurement_record(const std::string& person, int stroke, const QualityTarget& q) {
    // Pixel distances consistent with the bounce formulas by construction:
    // d1 + d2 fixed, and de chosen so the cross ratio returns bounce_y.
    const double span = 400.0;
    const double d1 = q.bounce_x / 152.5 * span;
    const double be = 200.0, dv = 300.0, bv = 250.0;
    const double de = q.bounce_y / 275.0 * (be * dv / bv);
    json r;
    r["person_id"] = person;
    r["stroke_index"] = stroke;
    r["d1_px"] = d1;
    r["d2_px"] = span - d1;
    r["de_px"] = de;
    r["be_px"] = be;
    r["dv_px"] = dv;
    r["bv_px"] = bv;
    r["h_ball_cm"] = q.clearance + 15.25;
    r["d_ball_m"] = q.speed * 3.0 / 60.0;
    r["n_frames"] = 3;
    r["h0_cm"] = 100.0;
    r["h1_cm"] = (1.0 - q.height_ratio) * 100.0;
    return r;
}

}  // namespace

void write_fixture_session(const std::filesystem::path& dir, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const ScaleSpec scale = ScaleSpec::mpu6050();
    const Rng root(seed);

    const std::array<std::string, 3> persons{"p01", "p02", "p03"};
    const std::array<Style, 3> styles{
        Style{{Eigen::Vector3d{20, 14, 5}, Eigen::Vector3d{12, 26, 8}, Eigen::Vector3d{16, 30, 10},
               Eigen::Vector3d{24, 12, 6}},
              0.05},
        Style{{Eigen::Vector3d{34, 10, 18}, Eigen::Vector3d{22, 18, 16},
               Eigen::Vector3d{10, 22, 20}, Eigen::Vector3d{30, 8, 12}},
              0.12},
        Style{{Eigen::Vector3d{12, 30, 28}, Eigen::Vector3d{30, 8, 24}, Eigen::Vector3d{26, 14, 6},
               Eigen::Vector3d{8, 26, 18}},
              0.0},
    };
    const QualityTarget good{140.0, 120.0, 5.5, 21.0, 0.04};
    const QualityTarget mid{95.0, 70.0, 12.0, 13.0, 0.22};
    const QualityTarget weak_a{55.0, 40.0, 22.0, 9.0, 0.40};
    const QualityTarget weak_b{61.0, 46.0, 20.0, 10.0, 0.45};

    constexpr int kStrokes = 10;
    json manifest;
    manifest["expected_realizations"] = kStrokes;
    manifest["participants"] = json::array();

    for (std::size_t p = 0; p < persons.size(); ++p) {
        const std::string& person = persons[p];
        Rng person_rng = root.split(1000 + p);
        const Style& style = styles[p];

        // Stroke layout along the recording: lead-in, strokes, gaps.
        std::vector<std::pair<std::int64_t, std::int64_t>> boundaries;
        std::vector<int> lengths;
        std::int64_t cursor = 12;
        for (int s = 0; s < kStrokes; ++s) {
            const int len = 46 + static_cast<int>(person_rng.uniform_index(7));  // 46..52
            boundaries.emplace_back(cursor, cursor + len);
            lengths.push_back(len);
            cursor += len + 8 + static_cast<int>(person_rng.uniform_index(6));
        }
        const std::int64_t total = cursor + 12;

        // True per-segment orientation sequences over the whole recording.
        std::array<std::vector<Quaternion>, 4> orientations;
        for (auto& seq : orientations) seq.assign(static_cast<std::size_t>(total), Quaternion::identity());
        for (int s = 0; s < kStrokes; ++s) {
            const auto [start, end] = boundaries[static_cast<std::size_t>(s)];
            const double amp_jitter = 1.0 + 0.06 * person_rng.normal();
            for (std::int64_t k = start; k < end; ++k) {
                const double tau = static_cast<double>(k - start) /
                                   static_cast<double>(end - start - 1);
                for (SensorId id : kAllSensors) {
                    const int idx = static_cast<int>(id);
                    const double lag = (id == SensorId::Wrist || id == SensorId::Forearm)
                                           ? style.phase
                                           : 0.0;
                    orientations[static_cast<std::size_t>(idx)][static_cast<std::size_t>(k)] =
                        segment_orientation(style.amplitude[static_cast<std::size_t>(idx)] *
                                                amp_jitter,
                                            tau, lag);
                }
            }
        }

        json sensors;
        for (SensorId id : kAllSensors) {
            const int idx = static_cast<int>(id);
            Rng sensor_rng = person_rng.split(10 + static_cast<std::uint64_t>(idx));
            const Eigen::Vector3d bias(0.010 + 0.004 * sensor_rng.normal(),
                                       -0.008 + 0.004 * sensor_rng.normal(),
                                       0.005 + 0.003 * sensor_rng.normal());
            SensorStream stream = stream_from_orientations(
                orientations[static_cast<std::size_t>(idx)], id, kRate, bias, 0.02,
                0.03 * 9.80665, sensor_rng);
            const std::string file = person + "_" + sensor_name(id) + ".csv";
            write_counts_csv(dir / file, stream, scale);
            sensors[sensor_name(id)] = file;
        }

        json annotation;
        annotation["person_id"] = person;
        annotation["boundaries"] = json::array();
        for (const auto& [start, end] : boundaries)
            annotation["boundaries"].push_back({start, end});
        {
            std::ofstream out(dir / (person + "_annotation.json"), std::ios::binary);
            out << annotation.dump(1) << '\n';
        }

        json measurements;
        measurements["person_id"] = person;
        measurements["strokes"] = json::array();
        Rng meas_rng = person_rng.split(99);
        for (int s = 0; s < kStrokes; ++s) {
            QualityTarget target = (p == 0) ? good : (p == 1) ? mid
                                   : (s < kStrokes / 2) ? weak_a
                                                        : weak_b;
            // The weak player's two lobes stay tight so the drill-down can
            // resolve them against the lobe separation.
            const double jitter = (p == 2) ? 0.02 : 1.0;
            target.bounce_x += 1.5 * jitter * meas_rng.normal();
            target.bounce_y += 1.5 * jitter * meas_rng.normal();
            target.clearance += 0.4 * jitter * meas_rng.normal();
            target.speed += 0.4 * jitter * meas_rng.normal();
            target.height_ratio += 0.01 * jitter * meas_rng.normal();
            measurements["strokes"].push_back(measurement_record(person, s, target));
        }
        {
            std::ofstream out(dir / (person + "_measurements.json"), std::ios::binary);
            out << measurements.dump(1) << '\n';
        }

        json participant;
        participant["person_id"] = person;
        participant["sensors"] = sensors;
        participant["annotation"] = person + "_annotation.json";
        participant["measurements"] = person + "_measurements.json";
        manifest["participants"].push_back(participant);
    }

    {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << manifest.dump(1) << '\n';
    }

    json config;
    config["manifest"] = "manifest.json";
    config["scale"] = "mpu6050";
    config["sample_rate_hz"] = kRate;
    config["cycle_length"] = 101;
    config["sweep"] = {{"log10_min", -3.0}, {"log10_max", 1.0}, {"count", 100}, {"k_max", 10}};
    config["kmeans"] = {{"seed", 42}, {"restarts", 50}};
    config["tsne"] = {{"perplexity", 5.0}, {"iterations", 500}, {"learning_rate", 100.0}};
    config["subcluster"] = {{"enabled", true}, {"target_cluster", -1}};
    config["output_dir"] = "out";
    {
        std::ofstream out(dir / "pipeline.json", std::ios::binary);
        out << config.dump(1) << '\n';
    }
}

}  // namespace strokebench::testsupport
