#include "strokebench/ekf.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "strokebench/errors.hpp"

namespace strokebench {

namespace {

void require_finite(const Eigen::Vector3d& v, const char* what) {
    if (!v.allFinite()) throw NumericError(std::string("non-finite ") + what);
}

Covariance6 symmetrize(const Covariance6& P) { return 0.5 * (P + P.transpose()); }

}  // namespace

void EkfConfig::validate() const {
    const double fields[] = {gyro_noise_density, bias_random_walk, accel_noise_std,
                             gravity_magnitude, accel_gate, initial_attitude_std,
                             initial_bias_std};
    for (double f : fields)
        if (!(f > 0.0) || !std::isfinite(f))
            throw ConfigError("all EkfConfig fields must be positive and finite");
}

Quaternion error_quat(const Eigen::Vector3d& delta_theta) {
    return Quaternion{0.5 * delta_theta.x(), 0.5 * delta_theta.y(), 0.5 * delta_theta.z(), 1.0}
        .normalized();
}

std::pair<EkfState, Covariance6> ekf_init(const Eigen::Vector3d& first_accel,
                                          const EkfConfig& cfg) {
    cfg.validate();
    require_finite(first_accel, "initial accel");
    if (first_accel.norm() <= 0.0) throw NumericError("cannot initialize from zero accel");

    // Stationary reading is f_b = R^T (0,0,g): recover roll/pitch, leave yaw 0.
    const double roll = std::atan2(first_accel.y(), first_accel.z());
    const double pitch = std::atan2(-first_accel.x(),
                                    std::sqrt(first_accel.y() * first_accel.y() +
                                              first_accel.z() * first_accel.z()));
    EkfState state;
    state.q = Quaternion::from_euler_zyx(0.0, pitch, roll);
    state.bias.setZero();

    // The initial attitude uncertainty lives in the tilt plane. Heading is
    // zeroed by convention at the first sample, so its variance starts near
    // zero; a large unobservable heading variance would otherwise leak into
    // tilt cross-covariances and let gravity residuals kick the heading.
    const Eigen::Vector3d gravity_body = state.q.rotate_inverse(Eigen::Vector3d(0, 0, 1));
    const double att_var = cfg.initial_attitude_std * cfg.initial_attitude_std;
    Covariance6 P = Covariance6::Zero();
    P.topLeftCorner<3, 3>() =
        att_var * (Eigen::Matrix3d::Identity() - gravity_body * gravity_body.transpose()) +
        (1e-6 * att_var) * (gravity_body * gravity_body.transpose());
    P.bottomRightCorner<3, 3>() =
        Eigen::Matrix3d::Identity() * (cfg.initial_bias_std * cfg.initial_bias_std);
    return {state, P};
}

std::pair<EkfState, Covariance6> ekf_propagate(const EkfState& state, const Covariance6& P,
                                               const Eigen::Vector3d& gyro_meas, double dt,
                                               const EkfConfig& cfg) {
    require_finite(gyro_meas, "gyro measurement");
    require_finite(state.bias, "bias state");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericError("dt must be positive and finite");

    const Eigen::Vector3d omega = gyro_meas - state.bias;

    EkfState next;
    next.bias = state.bias;
    next.q = (state.q * Quaternion::from_axis_angle(omega * dt)).normalized();

    Eigen::Matrix<double, 6, 6> F = Eigen::Matrix<double, 6, 6>::Identity();
    F.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() - skew(omega) * dt;
    F.topRightCorner<3, 3>() = -Eigen::Matrix3d::Identity() * dt;

    Covariance6 Q = Covariance6::Zero();
    Q.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() *
                              (cfg.gyro_noise_density * cfg.gyro_noise_density * dt);
    Q.bottomRightCorner<3, 3>() =
        Eigen::Matrix3d::Identity() * (cfg.bias_random_walk * cfg.bias_random_walk * dt);

    return {next, symmetrize(F * P * F.transpose() + Q)};
}

EkfUpdateResult ekf_update(const EkfState& state, const Covariance6& P,
                           const Eigen::Vector3d& accel_meas, const EkfConfig& cfg) {
    require_finite(accel_meas, "accel measurement");

    const double g = cfg.gravity_magnitude;
    const double norm = accel_meas.norm();
    if (norm <= 0.0 || std::abs(norm - g) / g > cfg.accel_gate)
        return {state, P, false};  // dynamic acceleration, not a gravity observation

    const Eigen::Vector3d z = accel_meas / norm;
    const Eigen::Vector3d g_s = state.q.rotate_inverse(Eigen::Vector3d(0.0, 0.0, 1.0));
    const Eigen::Vector3d residual = z - g_s;

    Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
    H.leftCols<3>() = skew(g_s);

    const double r_var = (cfg.accel_noise_std / g) * (cfg.accel_noise_std / g);
    const Eigen::Matrix3d S = H * P * H.transpose() + Eigen::Matrix3d::Identity() * r_var;

    Eigen::FullPivLU<Eigen::Matrix3d> lu(S);
    if (!lu.isInvertible()) throw NumericError("singular innovation covariance");
    const Eigen::Matrix<double, 6, 3> K = P * H.transpose() * lu.inverse();

    const Eigen::Matrix<double, 6, 1> correction = K * residual;
    EkfErrorState err;
    err.delta_theta = correction.head<3>();
    err.delta_bias = correction.tail<3>();

    // A gravity observation carries no information about rotation about the
    // gravity axis or the bias component along it; any correction that leaks
    // there comes from linearization noise in the cross-covariances and
    // random-walks the unobservable states. Project it out.
    err.delta_theta -= err.delta_theta.dot(g_s) * g_s;
    err.delta_bias -= err.delta_bias.dot(g_s) * g_s;

    EkfUpdateResult out;
    out.state.q = (state.q * error_quat(err.delta_theta)).normalized();
    out.state.bias = state.bias + err.delta_bias;
    out.P = symmetrize((Covariance6::Identity() - K * H) * P);
    out.accepted = true;
    return out;
}

OrientationTrack estimate_orientation(const SensorStream& stream, const EkfConfig& cfg) {
    cfg.validate();
    if (stream.size() < 2) throw ValidationError("stream too short for orientation estimation");
    const double dt = 1.0 / stream.sample_rate_hz;

    OrientationTrack track;
    track.sensor_id = stream.sensor_id;
    track.quats.reserve(stream.size());
    track.biases.reserve(stream.size());

    auto [state, P] = ekf_init(stream.samples[0].accel, cfg);
    track.quats.push_back(state.q);
    track.biases.push_back(state.bias);

    for (std::size_t k = 1; k < stream.size(); ++k) {
        try {
            std::tie(state, P) = ekf_propagate(state, P, stream.samples[k].gyro, dt, cfg);
            const auto updated = ekf_update(state, P, stream.samples[k].accel, cfg);
            state = updated.state;
            P = updated.P;
        } catch (const Error& e) {
            throw NumericError("filter failed at sample " + std::to_string(k) + " on " +
                               sensor_name(stream.sensor_id) + ": " + e.what());
        }
        track.quats.push_back(state.q);
        track.biases.push_back(state.bias);
    }
    return track;
}

}  // namespace strokebench
