#pragma once

#include <Eigen/Core>
#include <string>

namespace gtslam {

/// Calibration of a downward-facing camera: pixel intrinsics K, the rigid
/// mount transform T_RC from camera frame to robot frame, and the
/// camera-to-ground distance d derived from T_RC along the optical axis.
class CameraModel {
public:
    /// Throws std::invalid_argument if K is singular or not of the form
    /// [fx 0 cx; 0 fy cy; 0 0 1], if T_RC is not a rigid transform, or if
    /// the optical axis does not point at the ground (d must be > 0).
    CameraModel(const Eigen::Matrix3d& intrinsics,
                const Eigen::Matrix4d& camera_to_robot,
                int image_width, int image_height);

    const Eigen::Matrix3d& intrinsics() const { return k_; }
    const Eigen::Matrix3d& intrinsics_inverse() const { return k_inv_; }
    const Eigen::Matrix4d& camera_to_robot() const { return t_rc_; }
    double ground_distance() const { return d_; }
    int width() const { return width_; }
    int height() const { return height_; }

    /// Rectangle of ground (robot frame) seen by the full image, as the
    /// four projected image corners in pixel order TL, TR, BR, BL.
    Eigen::Matrix2Xd footprint_corners() const;

    /// Length of the ground-footprint diagonal in meters.
    double footprint_diagonal() const;

private:
    Eigen::Matrix3d k_;
    Eigen::Matrix3d k_inv_;
    Eigen::Matrix4d t_rc_;
    double d_;
    int width_;
    int height_;
};

/// Parses the plain-text camera config format (keys fx, fy, cx, cy, width,
/// height and a 16-value row-major t_rc; '#' starts a comment).
CameraModel load_camera_config(const std::string& path);

/// Writes a camera config file in the canonical format.
void save_camera_config(const CameraModel& cam, const std::string& path);

} // namespace gtslam
