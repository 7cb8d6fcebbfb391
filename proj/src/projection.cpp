#include "gtslam/projection.hpp"

#include "gtslam/errors.hpp"

#include <cmath>
#include <string>

namespace gtslam {

CameraPoints pixels_to_camera(const PixelPoints& pts, const CameraModel& cam) {
    CameraPoints out;
    out.m = cam.intrinsics_inverse() * pts.homogeneous() * cam.ground_distance();
    return out;
}

GroundPoints camera_to_ground(const CameraPoints& pts, const CameraModel& cam) {
    const Eigen::Matrix4d& t = cam.camera_to_robot();
    const Eigen::Matrix3d r = t.topLeftCorner<3, 3>();
    const Eigen::Vector3d c = t.topRightCorner<3, 1>();

    const Eigen::Matrix3Xd robot = (r * pts.m).colwise() + c;
    for (Eigen::Index i = 0; i < robot.cols(); ++i) {
        const double z = robot(2, i);
        if (std::abs(z) >= kPlanarityTolerance) {
            throw PlanarityError("point " + std::to_string(i) + " left the ground plane (z = " +
                                 std::to_string(z) + " m); check T_RC and ground distance");
        }
    }
    GroundPoints out;
    out.m = robot.topRows<2>();
    return out;
}

GroundPoints project_keypoints(const PixelPoints& pts, const CameraModel& cam) {
    return camera_to_ground(pixels_to_camera(pts, cam), cam);
}

GroundPoints transform_points(const Pose2& t, const GroundPoints& pts) {
    GroundPoints out;
    out.m = (t.rotation() * pts.m).colwise() + t.translation();
    return out;
}

} // namespace gtslam
