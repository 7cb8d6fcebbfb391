#pragma once

#include <Eigen/Core>
#include <cmath>

namespace gtslam {

/// Wraps an angle to (-pi, pi].
inline double normalize_angle(double a) {
    const double two_pi = 2.0 * M_PI;
    double r = std::fmod(a + M_PI, two_pi);
    if (r <= 0.0) {
        r += two_pi;
    }
    return r - M_PI;
}

/// A planar rigid-body pose (x, y, heading). Heading is kept in (-pi, pi].
struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Pose2() = default;
    Pose2(double x_, double y_, double theta_)
        : x(x_), y(y_), theta(normalize_angle(theta_)) {}

    Eigen::Vector2d translation() const { return {x, y}; }

    Eigen::Matrix2d rotation() const {
        const double c = std::cos(theta), s = std::sin(theta);
        Eigen::Matrix2d r;
        r << c, -s, s, c;
        return r;
    }

    /// 3x3 homogeneous transform of this pose.
    Eigen::Matrix3d to_matrix() const {
        Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
        m.topLeftCorner<2, 2>() = rotation();
        m(0, 2) = x;
        m(1, 2) = y;
        return m;
    }

    static Pose2 from_matrix(const Eigen::Matrix3d& m) {
        return {m(0, 2), m(1, 2), std::atan2(m(1, 0), m(0, 0))};
    }

    /// Group composition: matrix(result) = matrix(*this) * matrix(other).
    Pose2 compose(const Pose2& other) const {
        const double c = std::cos(theta), s = std::sin(theta);
        return {x + c * other.x - s * other.y,
                y + s * other.x + c * other.y,
                theta + other.theta};
    }

    Pose2 inverse() const {
        const double c = std::cos(theta), s = std::sin(theta);
        return {-(c * x + s * y), -(-s * x + c * y), -theta};
    }

    /// Transforms a point expressed in this pose's frame into the parent frame.
    Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
        return rotation() * p + translation();
    }

    Eigen::Vector3d to_vector() const { return {x, y, theta}; }
};

inline Pose2 compose(const Pose2& a, const Pose2& b) { return a.compose(b); }
inline Pose2 inverse(const Pose2& a) { return a.inverse(); }

/// Relative pose of b expressed in a's frame: a.compose(between(a, b)) == b.
inline Pose2 between(const Pose2& a, const Pose2& b) {
    return a.inverse().compose(b);
}

} // namespace gtslam
