#include "gtslam/estimation.hpp"

#include "gtslam/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gtslam {

PointPairs::PointPairs(GroundPoints src_points, GroundPoints dst_points)
    : src(std::move(src_points)), dst(std::move(dst_points)) {
    if (src.size() != dst.size()) {
        throw std::invalid_argument("PointPairs: src and dst lengths differ");
    }
    if (src.size() < 2) {
        throw std::invalid_argument("PointPairs: need at least two pairs");
    }
}

double huber_weight(double residual_norm, double delta) {
    if (delta <= 0.0) {
        throw std::invalid_argument("huber_weight: delta must be positive");
    }
    return residual_norm <= delta ? 1.0 : delta / residual_norm;
}

double covariance_score(const Eigen::Matrix3d& sigma) {
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("covariance_score: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(sigma);
    if (solver.eigenvalues().minCoeff() < -1e-12) {
        throw std::invalid_argument("covariance_score: matrix is not positive semidefinite");
    }
    const double max_eig = solver.eigenvalues().maxCoeff();
    if (max_eig <= 0.0) {
        throw std::domain_error("covariance_score: largest eigenvalue is not positive");
    }
    return std::log10(max_eig);
}

Eigen::VectorXd transform_residuals(const PointPairs& pairs, const Pose2& transform) {
    const Eigen::Matrix2Xd mapped =
        (transform.rotation() * pairs.src.m).colwise() + transform.translation();
    const Eigen::Matrix2Xd diff = pairs.dst.m - mapped;
    return Eigen::Map<const Eigen::VectorXd>(diff.data(), diff.size());
}

Eigen::MatrixXd transform_jacobian(const PointPairs& pairs, const Pose2& transform) {
    const Eigen::Index n = pairs.size();
    const double c = std::cos(transform.theta), s = std::sin(transform.theta);
    Eigen::MatrixXd j(2 * n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sx = pairs.src.m(0, i), sy = pairs.src.m(1, i);
        j(2 * i, 0) = -1.0;
        j(2 * i, 1) = 0.0;
        j(2 * i, 2) = s * sx + c * sy;  // -d(R*src)/dtheta, x row
        j(2 * i + 1, 0) = 0.0;
        j(2 * i + 1, 1) = -1.0;
        j(2 * i + 1, 2) = -c * sx + s * sy;  // y row
    }
    return j;
}

namespace {

// Weighted rigid least squares in closed form (2D Umeyama without scale).
Pose2 closed_form_fit(const PointPairs& pairs, const Eigen::VectorXd& weights) {
    const double total = weights.sum();
    const Eigen::Vector2d mu_src = (pairs.src.m * weights) / total;
    const Eigen::Vector2d mu_dst = (pairs.dst.m * weights) / total;

    double dot = 0.0, cross = 0.0, spread = 0.0;
    for (Eigen::Index i = 0; i < pairs.size(); ++i) {
        const Eigen::Vector2d s = pairs.src.m.col(i) - mu_src;
        const Eigen::Vector2d d = pairs.dst.m.col(i) - mu_dst;
        const double w = weights(i);
        dot += w * (s.x() * d.x() + s.y() * d.y());
        cross += w * (s.x() * d.y() - s.y() * d.x());
        spread += w * (s.squaredNorm() + d.squaredNorm());
    }
    if (spread < 1e-16) {
        throw DegenerateGeometryError("estimate_transform: all point pairs coincident");
    }
    if (std::hypot(dot, cross) < 1e-12 * spread) {
        throw DegenerateGeometryError("estimate_transform: rotation unobservable");
    }
    const double theta = std::atan2(cross, dot);
    const Eigen::Vector2d t = mu_dst - Pose2(0, 0, theta).rotation() * mu_src;
    return {t.x(), t.y(), theta};
}

double weighted_median(std::vector<std::pair<double, double>> value_weight) {
    std::sort(value_weight.begin(), value_weight.end());
    double total = 0.0;
    for (const auto& [v, w] : value_weight) {
        total += w;
    }
    double cum = 0.0;
    for (const auto& [v, w] : value_weight) {
        cum += w;
        if (cum >= 0.5 * total) {
            return v;
        }
    }
    return value_weight.back().first;
}

} // namespace

TransformEstimate estimate_transform(const PointPairs& pairs, const EstimateConfig& config) {
    if (config.huber_delta <= 0.0 || config.max_iterations < 1 || config.tolerance <= 0.0) {
        throw std::invalid_argument("estimate_transform: invalid config");
    }
    const Eigen::Index n = pairs.size();

    Pose2 params = closed_form_fit(pairs, Eigen::VectorXd::Ones(n));

    Eigen::VectorXd weights = Eigen::VectorXd::Ones(n);
    const auto weighted_normal_equations = [&](const Pose2& at, Eigen::Matrix3d& h,
                                               Eigen::Vector3d& g) {
        const Eigen::VectorXd e = transform_residuals(pairs, at);
        const Eigen::MatrixXd j = transform_jacobian(pairs, at);
        h.setZero();
        g.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            weights(i) = huber_weight(e.segment<2>(2 * i).norm(), config.huber_delta);
            const auto ji = j.middleRows<2>(2 * i);
            h += weights(i) * ji.transpose() * ji;
            g += weights(i) * ji.transpose() * e.segment<2>(2 * i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(h);
        if (eig.eigenvalues().minCoeff() <= 1e-14 * std::max(eig.eigenvalues().maxCoeff(), 0.0)) {
            throw DegenerateGeometryError("estimate_transform: normal equations singular");
        }
    };

    Eigen::Matrix3d h;
    Eigen::Vector3d g;
    int iterations = 0;
    for (; iterations < config.max_iterations; ++iterations) {
        weighted_normal_equations(params, h, g);
        const Eigen::Vector3d step = h.ldlt().solve(-g);
        params = Pose2(params.x + step.x(), params.y + step.y(), params.theta + step.z());
        if (step.norm() < config.tolerance) {
            ++iterations;
            break;
        }
    }

    // Covariance from the Laplace approximation at the final parameters,
    // with robust sigma from the weighted median of residual norms.
    weighted_normal_equations(params, h, g);
    const Eigen::VectorXd e = transform_residuals(pairs, params);
    std::vector<std::pair<double, double>> norms;
    norms.reserve(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        norms.emplace_back(e.segment<2>(2 * i).norm(), weights(i));
    }
    const double sigma_hat = 1.4826 * weighted_median(std::move(norms));

    TransformEstimate result;
    result.transform = params;
    const Eigen::Matrix3d cov = sigma_hat * sigma_hat * h.inverse();
    result.covariance = 0.5 * (cov + cov.transpose());
    result.inlier_weights = weights;
    result.iterations = iterations;
    return result;
}

} // namespace gtslam
