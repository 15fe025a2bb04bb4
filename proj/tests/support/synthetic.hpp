#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "strokebench/ekf.hpp"
#include "strokebench/geometry.hpp"
#include "strokebench/ingest.hpp"
#include "strokebench/quaternion.hpp"
#include "strokebench/rng.hpp"

namespace strokebench::testsupport {

// RAII temp directory for file-based tests.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct SyntheticTrack {
    SensorStream stream;
    std::vector<Quaternion> true_quats;  // body-to-world at every sample
    Eigen::Vector3d true_bias = Eigen::Vector3d::Zero();
};

// Stationary sensor with constant attitude, constant gyro bias and optional
// white noise on both sensors.
SyntheticTrack stationary_stream(const Quaternion& attitude, const Eigen::Vector3d& bias,
                                 double duration_s, double rate_hz, double gyro_noise_std,
                                 double accel_noise_std, Rng& rng, double gravity = 9.80665);

// Noiseless constant body-rate rotation about a fixed axis, zero bias.
SyntheticTrack constant_rate_rotation(const Eigen::Vector3d& axis, double total_angle_rad,
                                      double duration_s, double rate_hz,
                                      double gravity = 9.80665);

// Converts an orientation sequence into the gyro samples that reproduce it
// under exponential-map integration, plus gravity-consistent accel readings.
SensorStream stream_from_orientations(const std::vector<Quaternion>& quats, SensorId id,
                                      double rate_hz, const Eigen::Vector3d& bias,
                                      double gyro_noise_std, double accel_noise_std, Rng& rng,
                                      double gravity = 9.80665);

// Pinhole camera fixed over one end of the table (image x axis parallel to
// the table's across direction). World coordinates in cm: x across [0, W],
// y along [0, L], z up; the table plane is z = 0.
struct PinholeCamera {
    Eigen::Vector3d eye{76.25, -250.0, 170.0};
    Eigen::Vector3d target{76.25, 180.0, 0.0};
    double focal = 900.0;
    double cx = 640.0;
    double cy = 360.0;

    PixelPoint project(const Eigen::Vector3d& world) const;
};

// Full bounce annotation for a ball at (x_cm, y_cm) on the table.
BounceAnnotation annotate_bounce(const PinholeCamera& cam, double x_cm, double y_cm,
                                 const TableDims& dims);

// Isotropic Gaussian blobs, one block of `per_center` rows per center row.
Eigen::MatrixXd gaussian_blobs(const Eigen::MatrixXd& centers, int per_center, double std_dev,
                               Rng& rng);

// Exhaustive minimum-inertia partition for small instances (k^n assignments).
double exhaustive_kmeans_inertia(const Eigen::MatrixXd& points, int k);

}  // namespace strokebench::testsupport
