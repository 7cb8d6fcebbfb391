#include "gtslam/pose_graph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace gtslam {

int PoseGraph::add_pose(const Pose2& initial) {
    poses_.push_back(initial);
    return static_cast<int>(poses_.size()) - 1;
}

void PoseGraph::set_pose(int id, const Pose2& value) {
    poses_.at(static_cast<size_t>(id)) = value;
}

void PoseGraph::add_factor(const Factor& factor) {
    const auto check_id = [this](int id) {
        if (id < 0 || id >= pose_count()) {
            throw std::invalid_argument("PoseGraph: factor references unknown pose id");
        }
    };
    check_id(factor.id_a);
    if (factor.kind == FactorKind::prior) {
        if (has_prior_) {
            throw std::invalid_argument("PoseGraph: graph already has a prior");
        }
        if (factor.id_a != 0) {
            throw std::invalid_argument("PoseGraph: the prior must anchor pose 0");
        }
        has_prior_ = true;
    } else {
        check_id(factor.id_b);
        if (factor.id_a == factor.id_b) {
            throw std::invalid_argument("PoseGraph: between-factor ids must differ");
        }
        if (factor.kind == FactorKind::loop && std::abs(factor.id_a - factor.id_b) < 2) {
            throw std::invalid_argument("PoseGraph: loop factors must connect non-adjacent poses");
        }
    }
    if ((factor.information - factor.information.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("PoseGraph: information matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(factor.information);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument("PoseGraph: information matrix must be positive-definite");
    }
    factors_.push_back(factor);
}

Eigen::Vector3d PoseGraph::factor_error(const Factor& factor) const {
    if (factor.kind == FactorKind::prior) {
        const Pose2 err = between(factor.measurement, pose(factor.id_a));
        return err.to_vector();
    }
    const Pose2 rel = between(pose(factor.id_a), pose(factor.id_b));
    return between(factor.measurement, rel).to_vector();
}

double PoseGraph::cost() const {
    double total = 0.0;
    for (const Factor& f : factors_) {
        const Eigen::Vector3d e = factor_error(f);
        total += e.dot(f.information * e);
    }
    return total;
}

namespace {

// d(R(theta)^T)/dtheta.
Eigen::Matrix2d rotation_transpose_derivative(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix2d d;
    d << -s, c, -c, -s;
    return d;
}

} // namespace

OptimizeResult PoseGraph::optimize(const OptimizeConfig& config) {
    const int n = pose_count();
    OptimizeResult result;
    result.initial_cost = cost();
    result.final_cost = result.initial_cost;
    if (n == 0 || factors_.empty() || result.initial_cost == 0.0) {
        result.converged = true;
        return result;
    }

    const int dim = 3 * n;
    double lambda = config.initial_lambda;
    double current_cost = result.initial_cost;

    for (; result.iterations < config.max_iterations; ++result.iterations) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);

        for (const Factor& f : factors_) {
            const Eigen::Vector3d e = factor_error(f);
            if (f.kind == FactorKind::prior) {
                Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
                j.topLeftCorner<2, 2>() = f.measurement.rotation().transpose();
                j(2, 2) = 1.0;
                const int ia = 3 * f.id_a;
                h.block<3, 3>(ia, ia) += j.transpose() * f.information * j;
                b.segment<3>(ia) += j.transpose() * f.information * e;
                continue;
            }
            const Pose2& pa = pose(f.id_a);
            const Pose2& pb = pose(f.id_b);
            const Eigen::Matrix2d rm_t = f.measurement.rotation().transpose();
            const Eigen::Matrix2d ra_t = pa.rotation().transpose();
            const Eigen::Vector2d dt = pb.translation() - pa.translation();

            Eigen::Matrix3d ja = Eigen::Matrix3d::Zero();
            ja.topLeftCorner<2, 2>() = -rm_t * ra_t;
            ja.topRightCorner<2, 1>() = rm_t * rotation_transpose_derivative(pa.theta) * dt;
            ja(2, 2) = -1.0;

            Eigen::Matrix3d jb = Eigen::Matrix3d::Zero();
            jb.topLeftCorner<2, 2>() = rm_t * ra_t;
            jb(2, 2) = 1.0;

            const int ia = 3 * f.id_a;
            const int ib = 3 * f.id_b;
            h.block<3, 3>(ia, ia) += ja.transpose() * f.information * ja;
            h.block<3, 3>(ib, ib) += jb.transpose() * f.information * jb;
            h.block<3, 3>(ia, ib) += ja.transpose() * f.information * jb;
            h.block<3, 3>(ib, ia) += jb.transpose() * f.information * ja;
            b.segment<3>(ia) += ja.transpose() * f.information * e;
            b.segment<3>(ib) += jb.transpose() * f.information * e;
        }

        Eigen::MatrixXd damped = h;
        damped.diagonal() += lambda * h.diagonal();
        const Eigen::VectorXd step = damped.ldlt().solve(-b);

        if (!step.allFinite()) {
            lambda *= config.lambda_factor;
            continue;
        }
        if (step.norm() < 1e-14) {
            result.converged = true;
            break;
        }

        const std::vector<Pose2> backup = poses_;
        for (int i = 0; i < n; ++i) {
            poses_[static_cast<size_t>(i)] =
                Pose2(backup[static_cast<size_t>(i)].x + step(3 * i),
                      backup[static_cast<size_t>(i)].y + step(3 * i + 1),
                      backup[static_cast<size_t>(i)].theta + step(3 * i + 2));
        }
        const double new_cost = cost();
        if (new_cost < current_cost) {
            const double decrease = (current_cost - new_cost) / current_cost;
            current_cost = new_cost;
            lambda /= config.lambda_factor;
            if (decrease < config.relative_decrease_tol || new_cost == 0.0) {
                result.converged = true;
                ++result.iterations;
                break;
            }
        } else {
            poses_ = backup;
            lambda *= config.lambda_factor;
            if (lambda > 1e15) {
                break;  // damping exhausted; keep the best iterate
            }
        }
    }

    result.final_cost = current_cost;
    return result;
}

} // namespace gtslam
