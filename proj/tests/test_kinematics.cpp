#include <doctest.h>

#include <cmath>

#include "strokebench/errors.hpp"
#include "strokebench/kinematics.hpp"
#include "strokebench/rng.hpp"

using namespace strokebench;

namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::array<OrientationTrack, 4> constant_tracks(std::size_t len, const Quaternion& wrist,
                                                const Quaternion& forearm,
                                                const Quaternion& biceps,
                                                const Quaternion& shoulder) {
    std::array<OrientationTrack, 4> tracks;
    const Quaternion qs[4] = {wrist, forearm, biceps, shoulder};
    for (int s = 0; s < 4; ++s) {
        tracks[s].sensor_id = kAllSensors[static_cast<std::size_t>(s)];
        tracks[s].quats.assign(len, qs[s]);
        tracks[s].biases.assign(len, Eigen::Vector3d::Zero());
    }
    return tracks;
}

JointAngleTrack track_from_channel(const std::vector<double>& values, int channel) {
    JointAngleTrack t;
    t.frames.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) t.frames[k].channel(channel) = values[k];
    return t;
}

}  // namespace

TEST_CASE("relative_orientation") {
    Rng rng(3);
    SUBCASE("coincident frames give the identity") {
        const Quaternion q = Quaternion::from_euler_zyx(0.4, -0.2, 0.9);
        CHECK(Quaternion::angle_between(relative_orientation(q, q), Quaternion::identity()) <
              1e-12);
    }
    SUBCASE("identity proximal passes the distal through") {
        const Quaternion d = Quaternion::from_axis_angle(Eigen::Vector3d(0, 0, M_PI / 2));
        const Quaternion r = relative_orientation(Quaternion::identity(), d);
        CHECK(Quaternion::angle_between(r, d) < 1e-12);
    }
    SUBCASE("composes back to the distal frame") {
        for (int t = 0; t < 50; ++t) {
            const Quaternion p = Quaternion::from_euler_zyx(rng.uniform(-3, 3),
                                                            rng.uniform(-1.4, 1.4),
                                                            rng.uniform(-3, 3));
            const Quaternion d = Quaternion::from_euler_zyx(rng.uniform(-3, 3),
                                                            rng.uniform(-1.4, 1.4),
                                                            rng.uniform(-3, 3));
            const Quaternion rel = relative_orientation(p, d);
            CHECK(Quaternion::angle_between(p * rel, d) < 1e-9);
        }
    }
}

TEST_CASE("quat_to_euler") {
    SUBCASE("identity") {
        const EulerAngles e = quat_to_euler(Quaternion::identity());
        CHECK(e.yaw == doctest::Approx(0.0));
        CHECK(e.pitch == doctest::Approx(0.0));
        CHECK(e.roll == doctest::Approx(0.0));
    }
    SUBCASE("pure 90 degree yaw") {
        const EulerAngles e =
            quat_to_euler(Quaternion::from_axis_angle(Eigen::Vector3d(0, 0, M_PI / 2)));
        CHECK(e.yaw == doctest::Approx(90.0).epsilon(1e-9));
        CHECK(e.pitch == doctest::Approx(0.0));
        CHECK(e.roll == doctest::Approx(0.0));
    }
    SUBCASE("round trip within 1e-6 degrees away from gimbal lock") {
        Rng rng(7);
        for (int t = 0; t < 200; ++t) {
            const double yaw = rng.uniform(-179.0, 179.0);
            const double pitch = rng.uniform(-88.9, 88.9);
            const double roll = rng.uniform(-179.0, 179.0);
            const Quaternion q = Quaternion::from_euler_zyx(yaw * kDegToRad, pitch * kDegToRad,
                                                            roll * kDegToRad);
            const EulerAngles e = quat_to_euler(q);
            CHECK(e.yaw == doctest::Approx(yaw).epsilon(1e-8));
            CHECK(e.pitch == doctest::Approx(pitch).epsilon(1e-8));
            CHECK(e.roll == doctest::Approx(roll).epsilon(1e-8));
        }
    }
    SUBCASE("gimbal lock flags and zeroes roll") {
        bool flagged = false;
        const EulerAngles e = quat_to_euler(
            Quaternion::from_euler_zyx(0.3, 90.0 * kDegToRad, 0.2), &flagged);
        CHECK(flagged);
        CHECK(e.roll == 0.0);
        CHECK(std::abs(e.pitch) == doctest::Approx(90.0).epsilon(1e-6));
    }
    SUBCASE("raw angles stay within [-180, 180]") {
        Rng rng(9);
        for (int t = 0; t < 100; ++t) {
            const Quaternion q =
                Quaternion{rng.normal(), rng.normal(), rng.normal(), rng.normal()}.normalized();
            const EulerAngles e = quat_to_euler(q);
            CHECK(std::abs(e.yaw) <= 180.0 + 1e-9);
            CHECK(std::abs(e.pitch) <= 90.0 + 1e-9);
            CHECK(std::abs(e.roll) <= 180.0 + 1e-9);
        }
    }
}

TEST_CASE("joint_angles") {
    SUBCASE("identity everywhere maps to the zero signal") {
        const auto tracks = constant_tracks(16, Quaternion::identity(), Quaternion::identity(),
                                            Quaternion::identity(), Quaternion::identity());
        const JointAngleTrack t = joint_angles(tracks);
        REQUIRE(t.size() == 16);
        for (const auto& f : t.frames)
            for (int w = 0; w < kNumEulerChannels; ++w) CHECK(f.channel(w) == doctest::Approx(0.0));
    }
    SUBCASE("wrist rotated 30 deg about x against the forearm") {
        const Quaternion wrist = Quaternion::from_axis_angle(
            Eigen::Vector3d(30.0 * kDegToRad, 0, 0));
        const auto tracks = constant_tracks(8, wrist, Quaternion::identity(),
                                            Quaternion::identity(), Quaternion::identity());
        const JointAngleTrack t = joint_angles(tracks);
        for (const auto& f : t.frames) {
            CHECK(f.wrist.roll == doctest::Approx(30.0).epsilon(1e-9));
            CHECK(f.wrist.yaw == doctest::Approx(0.0));
            CHECK(f.wrist.pitch == doctest::Approx(0.0));
            CHECK(f.elbow.roll == doctest::Approx(0.0));
            CHECK(f.shoulder.roll == doctest::Approx(0.0));
        }
    }
    SUBCASE("a channel crossing 180 degrees unwraps continuously") {
        // Wrist yaw sweeps 140 -> 220 degrees relative to the forearm.
        std::array<OrientationTrack, 4> tracks = constant_tracks(
            41, Quaternion::identity(), Quaternion::identity(), Quaternion::identity(),
            Quaternion::identity());
        auto& wrist = tracks[static_cast<int>(SensorId::Wrist)];
        for (std::size_t k = 0; k < wrist.quats.size(); ++k) {
            const double yaw = (140.0 + 2.0 * static_cast<double>(k)) * kDegToRad;
            wrist.quats[k] = Quaternion::from_euler_zyx(yaw, 0, 0);
        }
        const JointAngleTrack t = joint_angles(tracks);
        for (std::size_t k = 1; k < t.size(); ++k) {
            const double step = t.frames[k].wrist.yaw - t.frames[k - 1].wrist.yaw;
            CHECK(std::abs(step) < 180.0);
        }
        CHECK(t.frames.back().wrist.yaw == doctest::Approx(220.0).epsilon(1e-6));
    }
    SUBCASE("length mismatch is an error") {
        auto tracks = constant_tracks(8, Quaternion::identity(), Quaternion::identity(),
                                      Quaternion::identity(), Quaternion::identity());
        tracks[2].quats.pop_back();
        CHECK_THROWS_AS(joint_angles(tracks), ValidationError);
    }
}

TEST_CASE("unwrap_degrees never alters values modulo 360") {
    Rng rng(21);
    std::vector<double> values(100);
    for (auto& v : values) v = rng.uniform(-720.0, 720.0);
    std::vector<double> unwrapped = values;
    unwrap_degrees(unwrapped);
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double delta = unwrapped[k] - values[k];
        CHECK(std::abs(delta / 360.0 - std::round(delta / 360.0)) < 1e-9);
    }
    for (std::size_t k = 1; k < unwrapped.size(); ++k)
        CHECK(std::abs(unwrapped[k] - unwrapped[k - 1]) <= 180.0 + 1e-9);
}

TEST_CASE("resample_track") {
    SUBCASE("identity when K equals the length") {
        std::vector<double> ramp(11);
        for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
        const JointAngleTrack t = track_from_channel(ramp, 4);
        const JointAngleTrack r = resample_track(t, 11);
        for (std::size_t k = 0; k < 11; ++k)
            CHECK(r.frames[k].channel(4) == doctest::Approx(ramp[k]).epsilon(1e-9));
    }
    SUBCASE("linear ramp 0..10 over 11 samples onto 6 points") {
        std::vector<double> ramp(11);
        for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
        const JointAngleTrack r = resample_track(track_from_channel(ramp, 0), 6);
        const double expected[6] = {0, 2, 4, 6, 8, 10};
        for (int k = 0; k < 6; ++k)
            CHECK(r.frames[static_cast<std::size_t>(k)].channel(0) ==
                  doctest::Approx(expected[k]).epsilon(1e-12));
    }
    SUBCASE("constant channel stays constant") {
        const JointAngleTrack r =
            resample_track(track_from_channel(std::vector<double>(7, 3.25), 8), 101);
        for (const auto& f : r.frames) CHECK(f.channel(8) == doctest::Approx(3.25));
    }
    SUBCASE("endpoints preserved exactly") {
        std::vector<double> values{1.5, -2.0, 7.75, 3.0};
        const JointAngleTrack r = resample_track(track_from_channel(values, 2), 17);
        CHECK(r.frames.front().channel(2) == 1.5);
        CHECK(r.frames.back().channel(2) == 3.0);
    }
    SUBCASE("too-short track") {
        CHECK_THROWS_AS(resample_track(track_from_channel({1.0}, 0), 10), ValidationError);
    }
}

TEST_CASE("mean_euler_signal") {
    SUBCASE("single track is its own mean") {
        std::vector<double> values{1, 2, 3, 4};
        const auto mean = mean_euler_signal({track_from_channel(values, 3)});
        CHECK(mean.n_q == 1);
        for (std::size_t k = 0; k < values.size(); ++k)
            CHECK(mean.channels(3, static_cast<Eigen::Index>(k)) == doctest::Approx(values[k]));
    }
    SUBCASE("a and -a average to zero") {
        Rng rng(33);
        std::vector<double> a(12), neg(12);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = rng.normal(0, 40);
            neg[i] = -a[i];
        }
        const auto mean = mean_euler_signal({track_from_channel(a, 6), track_from_channel(neg, 6)});
        for (Eigen::Index k = 0; k < mean.channels.cols(); ++k)
            CHECK(mean.channels(6, k) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("three constants 1, 2, 3 average to 2") {
        const auto mean = mean_euler_signal({track_from_channel(std::vector<double>(5, 1.0), 0),
                                             track_from_channel(std::vector<double>(5, 2.0), 0),
                                             track_from_channel(std::vector<double>(5, 3.0), 0)});
        CHECK(mean.n_q == 3);
        for (Eigen::Index k = 0; k < 5; ++k) CHECK(mean.channels(0, k) == doctest::Approx(2.0));
    }
    SUBCASE("empty list and mixed lengths are errors") {
        CHECK_THROWS_AS(mean_euler_signal({}), ValidationError);
        CHECK_THROWS_AS(mean_euler_signal({track_from_channel({1, 2}, 0),
                                           track_from_channel({1, 2, 3}, 0)}),
                        ValidationError);
    }
    SUBCASE("permutation invariance and linearity") {
        Rng rng(55);
        std::vector<JointAngleTrack> tracks;
        for (int j = 0; j < 5; ++j) {
            JointAngleTrack t;
            t.frames.resize(9);
            for (auto& f : t.frames)
                for (int w = 0; w < kNumEulerChannels; ++w) f.channel(w) = rng.normal(0, 25);
            tracks.push_back(std::move(t));
        }
        const auto mean = mean_euler_signal(tracks);

        std::vector<JointAngleTrack> shuffled{tracks[3], tracks[0], tracks[4], tracks[1],
                                              tracks[2]};
        const auto mean_shuffled = mean_euler_signal(shuffled);
        CHECK((mean.channels - mean_shuffled.channels).cwiseAbs().maxCoeff() < 1e-9);

        std::vector<JointAngleTrack> scaled = tracks;
        for (auto& t : scaled)
            for (auto& f : t.frames)
                for (int w = 0; w < kNumEulerChannels; ++w) f.channel(w) *= 2.5;
        const auto mean_scaled = mean_euler_signal(scaled);
        CHECK((mean_scaled.channels - 2.5 * mean.channels).cwiseAbs().maxCoeff() < 1e-9);
    }
}
