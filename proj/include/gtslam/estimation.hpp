#pragma once

#include "gtslam/points.hpp"
#include "gtslam/pose2.hpp"

#include <Eigen/Core>

namespace gtslam {

/// Matched ground-point correspondences between two observations.
/// src holds the points from the later frame, dst the points from the
/// earlier frame, so the fitted transform maps src onto dst and reads as
/// the robot motion expressed in the earlier frame.
struct PointPairs {
    GroundPoints src;
    GroundPoints dst;

    /// Throws std::invalid_argument unless lengths match and N >= 2.
    PointPairs(GroundPoints src_points, GroundPoints dst_points);

    Eigen::Index size() const { return src.size(); }
};

/// Result of the robust rigid-transform fit.
struct TransformEstimate {
    Pose2 transform;
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
    Eigen::VectorXd inlier_weights;  // final robust weight per pair, in (0, 1]
    int iterations = 0;
};

struct EstimateConfig {
    double huber_delta = 0.005;  // meters
    int max_iterations = 50;
    double tolerance = 1e-10;  // stop when the parameter update norm drops below this
};

/// Huber IRLS weight: 1 inside the quadratic zone, delta / r outside.
double huber_weight(double residual_norm, double delta);

/// log10 of the largest eigenvalue of a 3x3 covariance, the scalar
/// uncertainty used to gate loop closures. Throws std::invalid_argument for
/// non-symmetric or indefinite input and std::domain_error when the largest
/// eigenvalue is not positive (exactly certain estimates; callers must
/// special-case those).
double covariance_score(const Eigen::Matrix3d& sigma);

/// Stacked 2N residual vector: e_n = dst_n - (R * src_n + t).
Eigen::VectorXd transform_residuals(const PointPairs& pairs, const Pose2& transform);

/// Analytic Jacobian of the stacked residuals with respect to (x, y, theta).
Eigen::MatrixXd transform_jacobian(const PointPairs& pairs, const Pose2& transform);

/// Robust SE(2) fit: minimizes the Huber cost of the pair residual norms by
/// iteratively reweighted Gauss-Newton, starting from the closed-form
/// unweighted rigid least-squares solution. The covariance is the Laplace
/// approximation sigma^2 * (J^T W J)^-1 with a median-based robust sigma.
/// Throws DegenerateGeometryError when the geometry cannot constrain the
/// transform (e.g. all points coincident).
TransformEstimate estimate_transform(const PointPairs& pairs, const EstimateConfig& config = {});

} // namespace gtslam
