#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace gtslam {

/// Keypoint locations in homogeneous pixel coordinates; the third row is 1.
class PixelPoints {
public:
    PixelPoints() : h_(3, 0) {}

    explicit PixelPoints(const Eigen::Matrix2Xd& xy) : h_(3, xy.cols()) {
        h_.topRows<2>() = xy;
        h_.row(2).setOnes();
    }

    explicit PixelPoints(const Eigen::Matrix3Xd& h) : h_(h) {
        if ((h_.row(2).array() != 1.0).any()) {
            throw std::invalid_argument("PixelPoints: homogeneous row must be exactly 1");
        }
    }

    const Eigen::Matrix3Xd& homogeneous() const { return h_; }
    Eigen::Index size() const { return h_.cols(); }

private:
    Eigen::Matrix3Xd h_;
};

/// 3D points in meters, camera frame.
struct CameraPoints {
    Eigen::Matrix3Xd m;

    Eigen::Index size() const { return m.cols(); }
};

/// 2D points in meters, robot frame, on the ground plane.
struct GroundPoints {
    Eigen::Matrix2Xd m;

    Eigen::Index size() const { return m.cols(); }
    Eigen::Vector2d col(Eigen::Index i) const { return m.col(i); }
};

} // namespace gtslam
