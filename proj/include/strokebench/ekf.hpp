#pragma once

#include <Eigen/Core>
#include <vector>

#include "strokebench/ingest.hpp"
#include "strokebench/quaternion.hpp"

namespace strokebench {

using Covariance6 = Eigen::Matrix<double, 6, 6>;

struct EkfConfig {
    double gyro_noise_density = 0.005;    // rad/s/sqrt(Hz)
    double bias_random_walk = 0.0001;     // rad/s^2/sqrt(Hz)
    double accel_noise_std = 0.05 * 9.80665;  // m/s^2
    double gravity_magnitude = 9.80665;   // m/s^2
    double accel_gate = 0.15;             // tolerance on | |a| - g | / g
    double initial_attitude_std = 0.3;    // rad
    double initial_bias_std = 0.01;       // rad/s

    void validate() const;
};

struct EkfState {
    Quaternion q;                               // body-to-world
    Eigen::Vector3d bias = Eigen::Vector3d::Zero();  // rad/s
};

// Error state is [delta_theta (rad); delta_bias (rad/s)], body-frame,
// applied multiplicatively on the right of the quaternion estimate.
struct EkfErrorState {
    Eigen::Vector3d delta_theta = Eigen::Vector3d::Zero();
    Eigen::Vector3d delta_bias = Eigen::Vector3d::Zero();
};

struct OrientationTrack {
    SensorId sensor_id = SensorId::Wrist;
    std::vector<Quaternion> quats;
    std::vector<Eigen::Vector3d> biases;

    std::size_t size() const { return quats.size(); }
};

// Small-angle error quaternion: normalize((delta_theta / 2, 1)).
Quaternion error_quat(const Eigen::Vector3d& delta_theta);

// Tilt from the first accelerometer sample; yaw zeroed, bias zeroed,
// covariance diagonal from the configured initial standard deviations.
std::pair<EkfState, Covariance6> ekf_init(const Eigen::Vector3d& first_accel,
                                          const EkfConfig& cfg);

std::pair<EkfState, Covariance6> ekf_propagate(const EkfState& state, const Covariance6& P,
                                               const Eigen::Vector3d& gyro_meas, double dt,
                                               const EkfConfig& cfg);

struct EkfUpdateResult {
    EkfState state;
    Covariance6 P;
    bool accepted = false;
};

EkfUpdateResult ekf_update(const EkfState& state, const Covariance6& P,
                           const Eigen::Vector3d& accel_meas, const EkfConfig& cfg);

// Full filter pass over one stream: init at sample 0, then one propagate per
// interval and one (gated) gravity update per sample.
OrientationTrack estimate_orientation(const SensorStream& stream, const EkfConfig& cfg);

}  // namespace strokebench
