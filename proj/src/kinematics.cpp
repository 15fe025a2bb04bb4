#include "strokebench/kinematics.hpp"

#include <cmath>

#include "strokebench/errors.hpp"

namespace strokebench {

const std::array<const char*, kNumEulerChannels> kEulerChannelNames = {
    "sh_yaw", "sh_pitch", "sh_roll", "el_yaw", "el_pitch", "el_roll",
    "wr_yaw", "wr_pitch", "wr_roll"};

double JointAngleFrame::channel(int w) const {
    return const_cast<JointAngleFrame*>(this)->channel(w);
}

double& JointAngleFrame::channel(int w) {
    EulerAngles& joint = (w < 3) ? shoulder : (w < 6) ? elbow : wrist;
    switch (w % 3) {
        case 0: return joint.yaw;
        case 1: return joint.pitch;
        default: return joint.roll;
    }
}

Quaternion relative_orientation(const Quaternion& q_proximal, const Quaternion& q_distal) {
    return (q_proximal.conjugate() * q_distal).normalized();
}

EulerAngles quat_to_euler(const Quaternion& q, bool* gimbal) {
    constexpr double kRadToDeg = 180.0 / M_PI;
    const Eigen::Matrix3d R = q.to_matrix();

    double sin_pitch = -R(2, 0);
    if (sin_pitch > 1.0) sin_pitch = 1.0;
    if (sin_pitch < -1.0) sin_pitch = -1.0;
    const double pitch = std::asin(sin_pitch);

    EulerAngles e;
    e.pitch = pitch * kRadToDeg;
    if (std::abs(e.pitch) > 89.9) {
        // Gimbal lock: only yaw +/- roll is determined; put it all in yaw.
        e.yaw = std::atan2(-R(0, 1), R(1, 1)) * kRadToDeg;
        e.roll = 0.0;
        if (gimbal) *gimbal = true;
    } else {
        e.yaw = std::atan2(R(1, 0), R(0, 0)) * kRadToDeg;
        e.roll = std::atan2(R(2, 1), R(2, 2)) * kRadToDeg;
        if (gimbal) *gimbal = false;
    }
    return e;
}

void unwrap_degrees(std::vector<double>& values, double period) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        double delta = values[i] - values[i - 1];
        delta -= period * std::round(delta / period);
        values[i] = values[i - 1] + delta;
    }
}

JointAngleTrack joint_angles(const std::array<OrientationTrack, 4>& tracks) {
    const std::size_t len = tracks[0].size();
    for (const auto& t : tracks)
        if (t.size() != len) throw ValidationError("orientation tracks differ in length");

    auto idx = [&tracks](SensorId id) -> const OrientationTrack* {
        for (const auto& t : tracks)
            if (t.sensor_id == id) return &t;
        throw ValidationError(std::string("missing orientation track for ") + sensor_name(id));
    };
    const OrientationTrack* wrist = idx(SensorId::Wrist);
    const OrientationTrack* forearm = idx(SensorId::Forearm);
    const OrientationTrack* biceps = idx(SensorId::Biceps);
    const OrientationTrack* shoulder = idx(SensorId::Shoulder);

    JointAngleTrack out;
    out.frames.resize(len);
    for (std::size_t k = 0; k < len; ++k) {
        bool flag = false, g = false;
        JointAngleFrame& f = out.frames[k];
        f.shoulder = quat_to_euler(relative_orientation(shoulder->quats[k], biceps->quats[k]), &g);
        flag |= g;
        f.elbow = quat_to_euler(relative_orientation(biceps->quats[k], forearm->quats[k]), &g);
        flag |= g;
        f.wrist = quat_to_euler(relative_orientation(forearm->quats[k], wrist->quats[k]), &g);
        flag |= g;
        f.gimbal_flag = flag;
    }

    std::vector<double> channel(len);
    for (int w = 0; w < kNumEulerChannels; ++w) {
        for (std::size_t k = 0; k < len; ++k) channel[k] = out.frames[k].channel(w);
        unwrap_degrees(channel);
        for (std::size_t k = 0; k < len; ++k) out.frames[k].channel(w) = channel[k];
    }
    return out;
}

JointAngleTrack resample_track(const JointAngleTrack& track, std::size_t K) {
    const std::size_t n = track.size();
    if (n < 2) throw ValidationError("need at least 2 frames to resample");
    if (K < 2) throw ValidationError("resample length must be at least 2");

    JointAngleTrack out;
    out.person_id = track.person_id;
    out.stroke_index = track.stroke_index;
    out.frames.resize(K);
    for (std::size_t j = 0; j < K; ++j) {
        if (j == 0 || j == K - 1) {  // endpoints preserved exactly
            out.frames[j] = track.frames[j == 0 ? 0 : n - 1];
            continue;
        }
        const double pos = static_cast<double>(j) / static_cast<double>(K - 1) *
                           static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double t = pos - static_cast<double>(lo);
        const JointAngleFrame& a = track.frames[lo];
        const JointAngleFrame& b = track.frames[lo + 1];
        JointAngleFrame& f = out.frames[j];
        for (int w = 0; w < kNumEulerChannels; ++w)
            f.channel(w) = (1.0 - t) * a.channel(w) + t * b.channel(w);
        f.gimbal_flag = a.gimbal_flag || b.gimbal_flag;
    }
    return out;
}

MeanEulerSignal mean_euler_signal(const std::vector<JointAngleTrack>& tracks) {
    if (tracks.empty()) throw ValidationError("mean signal needs at least one track");
    const std::size_t K = tracks[0].size();
    for (const auto& t : tracks)
        if (t.size() != K) throw ValidationError("mean signal requires equal-length tracks");

    MeanEulerSignal mean;
    mean.n_q = tracks.size();
    mean.channels = Eigen::MatrixXd::Zero(kNumEulerChannels, static_cast<Eigen::Index>(K));
    for (const auto& t : tracks)
        for (int w = 0; w < kNumEulerChannels; ++w)
            for (std::size_t k = 0; k < K; ++k)
                mean.channels(w, static_cast<Eigen::Index>(k)) += t.frames[k].channel(w);
    mean.channels /= static_cast<double>(tracks.size());
    return mean;
}

}  // namespace strokebench
