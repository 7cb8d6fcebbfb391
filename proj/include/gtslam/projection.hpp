#pragma once

#include "gtslam/camera_model.hpp"
#include "gtslam/points.hpp"
#include "gtslam/pose2.hpp"

namespace gtslam {

/// Tolerance on the robot-frame Z component when dropping to the ground
/// plane. Violations indicate a bad T_RC / ground-distance pair.
inline constexpr double kPlanarityTolerance = 1e-9;

/// Back-projects homogeneous pixels to metric camera-frame points at the
/// known ground distance: each column becomes K^-1 * p * d, so the
/// homogeneous 1 turns into a Z component equal to d.
CameraPoints pixels_to_camera(const PixelPoints& pts, const CameraModel& cam);

/// Transforms camera-frame points into the robot frame with T_RC and drops
/// the Z component. Throws PlanarityError if any |Z| >= 1e-9 m.
GroundPoints camera_to_ground(const CameraPoints& pts, const CameraModel& cam);

/// Full pixel -> ground projection chain.
GroundPoints project_keypoints(const PixelPoints& pts, const CameraModel& cam);

/// Applies a rigid motion to ground points (columnwise R*p + t).
GroundPoints transform_points(const Pose2& t, const GroundPoints& pts);

} // namespace gtslam
