#include "synthetic.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <limits>

#include "strokebench/errors.hpp"

namespace strokebench::testsupport {

TempDir::TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("strokebench_" + tag + "_" + std::to_string(counter.fetch_add(1)) + "_" +
             std::to_string(static_cast<unsigned long>(::getpid())));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

SyntheticTrack stationary_stream(const Quaternion& attitude, const Eigen::Vector3d& bias,
                                 double duration_s, double rate_hz, double gyro_noise_std,
                                 double accel_noise_std, Rng& rng, double gravity) {
    const auto n = static_cast<std::size_t>(duration_s * rate_hz);
    SyntheticTrack track;
    track.true_bias = bias;
    track.stream.sensor_id = SensorId::Wrist;
    track.stream.sample_rate_hz = rate_hz;
    track.stream.samples.resize(n);
    track.true_quats.assign(n, attitude.normalized());

    const Eigen::Vector3d gravity_body =
        attitude.normalized().rotate_inverse(Eigen::Vector3d(0.0, 0.0, gravity));
    for (std::size_t k = 0; k < n; ++k) {
        ImuSample& s = track.stream.samples[k];
        s.index = static_cast<std::int64_t>(k);
        for (int i = 0; i < 3; ++i) {
            s.gyro[i] = bias[i] + (gyro_noise_std > 0.0 ? rng.normal(0.0, gyro_noise_std) : 0.0);
            s.accel[i] =
                gravity_body[i] + (accel_noise_std > 0.0 ? rng.normal(0.0, accel_noise_std) : 0.0);
        }
    }
    return track;
}

SyntheticTrack constant_rate_rotation(const Eigen::Vector3d& axis, double total_angle_rad,
                                      double duration_s, double rate_hz, double gravity) {
    const auto n = static_cast<std::size_t>(duration_s * rate_hz) + 1;
    const double dt = 1.0 / rate_hz;
    const Eigen::Vector3d unit_axis = axis.normalized();
    const double rate = total_angle_rad / duration_s;

    SyntheticTrack track;
    track.stream.sensor_id = SensorId::Wrist;
    track.stream.sample_rate_hz = rate_hz;
    track.stream.samples.resize(n);
    track.true_quats.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = rate * dt * static_cast<double>(k);
        const Quaternion q = Quaternion::from_axis_angle(unit_axis * angle);
        track.true_quats[k] = q;
        ImuSample& s = track.stream.samples[k];
        s.index = static_cast<std::int64_t>(k);
        s.gyro = unit_axis * rate;
        s.accel = q.rotate_inverse(Eigen::Vector3d(0.0, 0.0, gravity));
    }
    return track;
}

SensorStream stream_from_orientations(const std::vector<Quaternion>& quats, SensorId id,
                                      double rate_hz, const Eigen::Vector3d& bias,
                                      double gyro_noise_std, double accel_noise_std, Rng& rng,
                                      double gravity) {
    const double dt = 1.0 / rate_hz;
    SensorStream stream;
    stream.sensor_id = id;
    stream.sample_rate_hz = rate_hz;
    stream.samples.resize(quats.size());
    for (std::size_t k = 0; k < quats.size(); ++k) {
        ImuSample& s = stream.samples[k];
        s.index = static_cast<std::int64_t>(k);
        Eigen::Vector3d omega = Eigen::Vector3d::Zero();
        if (k > 0) {
            // Body rate reproducing q_{k-1} -> q_k over one step.
            const Quaternion delta = quats[k - 1].conjugate() * quats[k];
            const double half_angle = std::atan2(delta.vec().norm(), delta.w);
            if (delta.vec().norm() > 1e-15)
                omega = delta.vec().normalized() * (2.0 * half_angle / dt);
        }
        for (int i = 0; i < 3; ++i) {
            s.gyro[i] = omega[i] + bias[i] +
                        (gyro_noise_std > 0.0 ? rng.normal(0.0, gyro_noise_std) : 0.0);
        }
        const Eigen::Vector3d gravity_body =
            quats[k].rotate_inverse(Eigen::Vector3d(0.0, 0.0, gravity));
        for (int i = 0; i < 3; ++i) {
            s.accel[i] = gravity_body[i] +
                         (accel_noise_std > 0.0 ? rng.normal(0.0, accel_noise_std) : 0.0);
        }
    }
    return stream;
}

PixelPoint PinholeCamera::project(const Eigen::Vector3d& world) const {
    const Eigen::Vector3d forward = (target - eye).normalized();
    const Eigen::Vector3d up(0.0, 0.0, 1.0);
    Eigen::Vector3d cam_x = forward.cross(up);  // image u, toward world +x
    if (cam_x.norm() < 1e-12) throw GeometryError("camera looking straight down");
    cam_x.normalize();
    const Eigen::Vector3d cam_y = forward.cross(cam_x).normalized();  // image v, grows downward
    const Eigen::Vector3d rel = world - eye;
    const double depth = rel.dot(forward);
    if (depth <= 1e-9) throw GeometryError("point behind camera");
    return {focal * rel.dot(cam_x) / depth + cx, focal * rel.dot(cam_y) / depth + cy};
}

BounceAnnotation annotate_bounce(const PinholeCamera& cam, double x_cm, double y_cm,
                                 const TableDims& dims) {
    const double W = dims.width_cm;
    const double L = dims.length_cm;
    BounceAnnotation ann;
    ann.edge_line_1 = {cam.project({0.0, 40.0, 0.0}), cam.project({0.0, 230.0, 0.0})};
    ann.edge_line_2 = {cam.project({W, 40.0, 0.0}), cam.project({W, 230.0, 0.0})};
    ann.across_ref = {cam.project({0.0, L, 0.0}), cam.project({W, L, 0.0})};
    ann.ball = cam.project({x_cm, y_cm, 0.0});
    // Reference on the measurement line at y = 0, so the E..B pair spans the
    // full table length and the cross ratio recovers the distance from E.
    ann.net_ref = cam.project({x_cm, 0.0, 0.0});
    return ann;
}

Eigen::MatrixXd gaussian_blobs(const Eigen::MatrixXd& centers, int per_center, double std_dev,
                               Rng& rng) {
    const Eigen::Index k = centers.rows();
    const Eigen::Index dim = centers.cols();
    Eigen::MatrixXd points(k * per_center, dim);
    Eigen::Index row = 0;
    for (Eigen::Index c = 0; c < k; ++c)
        for (int i = 0; i < per_center; ++i, ++row)
            for (Eigen::Index d = 0; d < dim; ++d)
                points(row, d) = centers(c, d) + rng.normal(0.0, std_dev);
    return points;
}

double exhaustive_kmeans_inertia(const Eigen::MatrixXd& points, int k) {
    const auto n = static_cast<int>(points.rows());
    const Eigen::Index dim = points.cols();
    double best = std::numeric_limits<double>::infinity();

    std::vector<int> assignment(static_cast<std::size_t>(n), 0);
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(k);

    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        for (int i = 0; i < n; ++i) {
            assignment[static_cast<std::size_t>(i)] = static_cast<int>(c % k);
            c /= static_cast<std::uint64_t>(k);
        }
        Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(k, dim);
        std::vector<int> count(static_cast<std::size_t>(k), 0);
        for (int i = 0; i < n; ++i) {
            centroid.row(assignment[static_cast<std::size_t>(i)]) += points.row(i);
            ++count[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
        }
        for (int c2 = 0; c2 < k; ++c2)
            if (count[static_cast<std::size_t>(c2)] > 0)
                centroid.row(c2) /= static_cast<double>(count[static_cast<std::size_t>(c2)]);
        double inertia = 0.0;
        for (int i = 0; i < n; ++i)
            inertia +=
                (points.row(i) - centroid.row(assignment[static_cast<std::size_t>(i)])).squaredNorm();
        best = std::min(best, inertia);
    }
    return best;
}

}  // namespace strokebench::testsupport
