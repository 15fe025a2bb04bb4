#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>

namespace strokebench {

// Unit quaternion, Hamilton convention, body-to-world, scalar-last storage
// (x, y, z, w). normalized() canonicalizes to w >= 0 so every orientation has
// a single representation.
struct Quaternion {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double w = 1.0;

    Quaternion() = default;
    Quaternion(double x_, double y_, double z_, double w_) : x(x_), y(y_), z(z_), w(w_) {}

    static Quaternion identity() { return {0.0, 0.0, 0.0, 1.0}; }

    static Quaternion from_axis_angle(const Eigen::Vector3d& axis_angle) {
        const double angle = axis_angle.norm();
        if (angle < 1e-300) return identity();
        const double half = 0.5 * angle;
        const Eigen::Vector3d v = (std::sin(half) / angle) * axis_angle;
        return Quaternion{v.x(), v.y(), v.z(), std::cos(half)}.normalized();
    }

    // Intrinsic Z-Y-X (yaw, pitch, roll), radians.
    static Quaternion from_euler_zyx(double yaw, double pitch, double roll) {
        const Quaternion qz{0.0, 0.0, std::sin(0.5 * yaw), std::cos(0.5 * yaw)};
        const Quaternion qy{0.0, std::sin(0.5 * pitch), 0.0, std::cos(0.5 * pitch)};
        const Quaternion qx{std::sin(0.5 * roll), 0.0, 0.0, std::cos(0.5 * roll)};
        return (qz * qy * qx).normalized();
    }

    Eigen::Vector3d vec() const { return {x, y, z}; }

    double norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }

    Quaternion conjugate() const { return {-x, -y, -z, w}; }

    Quaternion normalized() const {
        const double n = norm();
        Quaternion q{x / n, y / n, z / n, w / n};
        if (q.w < 0.0) { q.x = -q.x; q.y = -q.y; q.z = -q.z; q.w = -q.w; }
        return q;
    }

    // Hamilton product a (x) b.
    friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
        return {a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
                a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z};
    }

    // Rotate a body-frame vector into the world frame.
    Eigen::Vector3d rotate(const Eigen::Vector3d& v) const {
        const Eigen::Vector3d u = vec();
        const Eigen::Vector3d t = 2.0 * u.cross(v);
        return v + w * t + u.cross(t);
    }

    // World-frame vector expressed in the body frame.
    Eigen::Vector3d rotate_inverse(const Eigen::Vector3d& v) const {
        return conjugate().rotate(v);
    }

    Eigen::Matrix3d to_matrix() const {
        Eigen::Matrix3d m;
        const double xx = x * x, yy = y * y, zz = z * z;
        const double xy = x * y, xz = x * z, yz = y * z;
        const double wx = w * x, wy = w * y, wz = w * z;
        m << 1 - 2 * (yy + zz), 2 * (xy - wz), 2 * (xz + wy),
             2 * (xy + wz), 1 - 2 * (xx + zz), 2 * (yz - wx),
             2 * (xz - wy), 2 * (yz + wx), 1 - 2 * (xx + yy);
        return m;
    }

    // Rotation angle (radians) separating two orientations.
    static double angle_between(const Quaternion& a, const Quaternion& b) {
        const Quaternion d = a.conjugate() * b;
        return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w));
    }
};

inline Quaternion quat_multiply(const Quaternion& a, const Quaternion& b) { return a * b; }

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m <<     0, -v.z(),  v.y(),
         v.z(),      0, -v.x(),
        -v.y(),  v.x(),      0;
    return m;
}

}  // namespace strokebench
