#pragma once

#include "gtslam/pose2.hpp"

#include <Eigen/Core>

#include <vector>

namespace gtslam {

enum class FactorKind { prior, odometry, loop };

/// A measurement constraint in the pose graph. Priors constrain a single
/// pose; odometry and loop factors constrain the relative pose between two.
/// The information matrix is the inverse measurement covariance.
struct Factor {
    FactorKind kind = FactorKind::prior;
    int id_a = 0;
    int id_b = -1;  // unused for priors
    Pose2 measurement;
    Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
};

struct OptimizeConfig {
    double initial_lambda = 1e-4;
    double lambda_factor = 10.0;  // x on rejected steps, / on accepted ones
    double relative_decrease_tol = 1e-9;
    int max_iterations = 100;
};

struct OptimizeResult {
    int iterations = 0;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    bool converged = false;
};

/// Pose variables plus prior/odometry/loop factors, optimized by
/// Levenberg-Marquardt on the total weighted squared error. Exactly one
/// prior is allowed and it must sit on pose 0 (the gauge anchor).
class PoseGraph {
public:
    /// Poses are added with contiguous ids starting at 0.
    int add_pose(const Pose2& initial);
    void set_pose(int id, const Pose2& value);
    const Pose2& pose(int id) const { return poses_[static_cast<size_t>(id)]; }
    const std::vector<Pose2>& poses() const { return poses_; }
    int pose_count() const { return static_cast<int>(poses_.size()); }

    /// Validates ids, the single-prior rule, loop non-adjacency, and that
    /// the information matrix is symmetric positive-definite.
    void add_factor(const Factor& factor);
    const std::vector<Factor>& factors() const { return factors_; }

    /// Unweighted residual of one factor at the current estimates:
    /// the (x, y, theta) vector of measurement^-1 * (pose_a^-1 * pose_b),
    /// with the angle wrapped to (-pi, pi].
    Eigen::Vector3d factor_error(const Factor& factor) const;

    /// Total cost: sum of e^T * information * e over all factors.
    double cost() const;

    /// Levenberg-Marquardt with multiplicative damping on the Hessian
    /// diagonal. Accepted steps never increase the cost; on non-convergence
    /// the best iterate is kept and `converged` is false.
    OptimizeResult optimize(const OptimizeConfig& config = {});

private:
    std::vector<Pose2> poses_;
    std::vector<Factor> factors_;
    bool has_prior_ = false;
};

} // namespace gtslam
