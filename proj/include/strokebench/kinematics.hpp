#pragma once

#include <array>
#include <string>
#include <vector>

#include "strokebench/ekf.hpp"
#include "strokebench/quaternion.hpp"

namespace strokebench {

// Intrinsic Z-Y-X decomposition, degrees.
struct EulerAngles {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
};

struct JointAngleFrame {
    EulerAngles shoulder;
    EulerAngles elbow;
    EulerAngles wrist;
    bool gimbal_flag = false;  // any joint within 0.1 deg of pitch +/-90

    // Channel order: sh_yaw, sh_pitch, sh_roll, el_yaw, el_pitch, el_roll,
    // wr_yaw, wr_pitch, wr_roll.
    double channel(int w) const;
    double& channel(int w);
};

inline constexpr int kNumEulerChannels = 9;
extern const std::array<const char*, kNumEulerChannels> kEulerChannelNames;

struct JointAngleTrack {
    std::string person_id;
    std::int64_t stroke_index = 0;
    std::vector<JointAngleFrame> frames;

    std::size_t size() const { return frames.size(); }
};

struct MeanEulerSignal {
    int cluster_id = 0;
    // 9 x K, one row per channel.
    Eigen::MatrixXd channels;
    std::size_t n_q = 0;
};

// Distal orientation expressed in the proximal segment's frame.
Quaternion relative_orientation(const Quaternion& q_proximal, const Quaternion& q_distal);

// (yaw, pitch, roll) in degrees; pitch in [-90, 90]. Near gimbal lock
// (|pitch| > 89.9 deg) yaw absorbs the free rotation and roll is zeroed.
EulerAngles quat_to_euler(const Quaternion& q, bool* gimbal = nullptr);

// Joint pairing: wrist <- (forearm, wrist), elbow <- (biceps, forearm),
// shoulder <- (shoulder, biceps). Angles unwrapped along time per channel.
JointAngleTrack joint_angles(const std::array<OrientationTrack, 4>& tracks);

// Linear resample of every channel onto K uniform points of normalized time.
JointAngleTrack resample_track(const JointAngleTrack& track, std::size_t K);

MeanEulerSignal mean_euler_signal(const std::vector<JointAngleTrack>& tracks);

// In-place unwrap so no consecutive step exceeds half the period.
void unwrap_degrees(std::vector<double>& values, double period = 360.0);

}  // namespace strokebench
