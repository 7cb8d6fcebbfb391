#include "gtslam/slam_system.hpp"

#include "gtslam/errors.hpp"
#include "gtslam/matching.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gtslam {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Covariance score that does not throw: exactly certain estimates map to
// -infinity, which passes any threshold.
double loop_covariance_score(const Eigen::Matrix3d& covariance) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(covariance);
    const double max_eig = eig.eigenvalues().maxCoeff();
    if (max_eig <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return std::log10(max_eig);
}

PointPairs matched_pairs(const FeatureSet& query, const FeatureSet& train,
                         const std::vector<Match>& matches) {
    Eigen::Matrix2Xd src(2, static_cast<Eigen::Index>(matches.size()));
    Eigen::Matrix2Xd dst(2, static_cast<Eigen::Index>(matches.size()));
    for (size_t i = 0; i < matches.size(); ++i) {
        src.col(static_cast<Eigen::Index>(i)) = query.points.col(matches[i].query_index);
        dst.col(static_cast<Eigen::Index>(i)) = train.points.col(matches[i].train_index);
    }
    return {GroundPoints{src}, GroundPoints{dst}};
}

constexpr double kCovarianceFloor = 1e-10;
constexpr double kPriorVariance = 1e-12;
constexpr double kDegenerateOdometryVariance = 1e2;

} // namespace

const char* to_string(LoopAuditEntry::Stage stage) {
    switch (stage) {
        case LoopAuditEntry::Stage::accepted: return "accepted";
        case LoopAuditEntry::Stage::rejected_match_count: return "rejected_match_count";
        case LoopAuditEntry::Stage::rejected_covariance: return "rejected_covariance";
        case LoopAuditEntry::Stage::rejected_degenerate: return "rejected_degenerate";
    }
    return "unknown";
}

Eigen::Matrix3d information_from_covariance(const Eigen::Matrix3d& covariance) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(covariance);
    const Eigen::Vector3d floored = eig.eigenvalues().cwiseMax(kCovarianceFloor);
    const Eigen::Matrix3d info = eig.eigenvectors() * floored.cwiseInverse().asDiagonal() *
                                 eig.eigenvectors().transpose();
    return 0.5 * (info + info.transpose());
}

SlamSystem::SlamSystem(CameraModel camera, Vocabulary vocabulary, SlamConfig config)
    : camera_(std::move(camera)),
      vocabulary_(std::move(vocabulary)),
      config_(config),
      database_(config.insertion_delay) {
    if (config_.insertion_delay < 2) {
        throw std::invalid_argument("SlamSystem: insertion delay must be >= 2");
    }
    if (config_.thresholds.bow_score_min < 0.0 || config_.thresholds.bow_score_min > 1.0) {
        throw std::invalid_argument("SlamSystem: bow threshold must be in [0, 1]");
    }
    if (config_.thresholds.match_count_min < 2) {
        throw std::invalid_argument("SlamSystem: match-count threshold must be >= 2");
    }
    if (config_.loop_closure && !vocabulary_.valid()) {
        throw std::invalid_argument("SlamSystem: loop closure requires a vocabulary");
    }
}

SlamSystem::SlamSystem(CameraModel camera, SlamConfig config)
    : SlamSystem(std::move(camera), Vocabulary(),
                 [&config] {
                     config.loop_closure = false;
                     return config;
                 }()) {}

Pose2 SlamSystem::process_image(const Image& image) {
    const auto start = Clock::now();
    FeatureSet features = extract_features(image, camera_, config_.detector);
    const double extract_ms = ms_since(start);
    const Pose2 pose = process_observation(std::move(features));
    timings_.back().extract_ms = extract_ms;
    return pose;
}

Pose2 SlamSystem::process_observation(FeatureSet features) {
    const int id = static_cast<int>(records_.size());
    StepTiming timing;

    BowVector bow;
    if (config_.loop_closure) {
        bow = vocabulary_.to_bow(features.descriptors);
    }

    if (id == 0) {
        graph_.add_pose(config_.prior_pose);
        Factor prior;
        prior.kind = FactorKind::prior;
        prior.id_a = 0;
        prior.measurement = config_.prior_pose;
        prior.information =
            Eigen::Matrix3d::Identity() * (1.0 / kPriorVariance);
        graph_.add_factor(prior);
    } else {
        const auto odo_start = Clock::now();
        const Factor odo = odometry_factor(records_.back(), features);
        graph_.add_pose(graph_.pose(id - 1).compose(odo.measurement));
        graph_.add_factor(odo);
        timing.odometry_ms = ms_since(odo_start);
    }

    bool optimized = false;
    if (config_.loop_closure && id > 0) {
        const auto loop_start = Clock::now();
        const std::vector<Factor> closures = find_loop_closures(features, bow, id);
        for (const Factor& f : closures) {
            graph_.add_factor(f);
            ++loop_factor_count_;
        }
        timing.loop_ms = ms_since(loop_start);

        if (!closures.empty()) {
            const auto opt_start = Clock::now();
            const OptimizeResult result = graph_.optimize(config_.optimize);
            timing.optimize_ms = ms_since(opt_start);
            optimizations_.push_back({id, result});
            optimized = true;
        }
    }
    (void)optimized;

    records_.push_back({id, std::move(features), bow});
    if (config_.loop_closure) {
        // Visibility is delayed by k at query time, so inserting now matches
        // adding observation n-k when observation n arrives.
        database_.insert(id, std::move(bow));
    }
    timings_.push_back(timing);
    return graph_.pose(id);
}

Factor SlamSystem::odometry_factor(const ObservationRecord& prev, const FeatureSet& current) {
    Factor factor;
    factor.kind = FactorKind::odometry;
    factor.id_a = prev.id;
    factor.id_b = prev.id + 1;

    std::vector<Match> matches;
    if (!current.empty() && prev.features.size() >= 2) {
        matches = match(current, prev.features, config_.match_ratio);
    }
    if (static_cast<int>(matches.size()) >= config_.min_odometry_matches) {
        try {
            const TransformEstimate est =
                estimate_transform(matched_pairs(current, prev.features, matches),
                                   config_.estimate);
            factor.measurement = est.transform;
            factor.information = information_from_covariance(est.covariance);
            return factor;
        } catch (const DegenerateGeometryError&) {
            // fall through to the weak identity factor
        }
    }
    // Identity measurement with a wide covariance keeps the graph connected
    // through frames that cannot be matched; loop closures can still correct
    // the trajectory later.
    degenerate_ids_.push_back(factor.id_b);
    factor.measurement = Pose2();
    factor.information =
        Eigen::Matrix3d::Identity() * (1.0 / kDegenerateOdometryVariance);
    return factor;
}

std::pair<LoopAuditEntry, std::optional<Factor>> SlamSystem::gate_loop_candidate(
    const FeatureSet& current, int current_id, const ObservationRecord& candidate,
    double bow_score) const {
    LoopAuditEntry entry;
    entry.image_id = current_id;
    entry.candidate_id = candidate.id;
    entry.bow_score = bow_score;
    entry.covariance_score = std::numeric_limits<double>::quiet_NaN();

    std::vector<Match> matches;
    if (!current.empty() && candidate.features.size() >= 2) {
        matches = match(current, candidate.features, config_.match_ratio);
    }
    entry.match_count = static_cast<int>(matches.size());
    if (entry.match_count < config_.thresholds.match_count_min) {
        entry.stage = LoopAuditEntry::Stage::rejected_match_count;
        return {entry, std::nullopt};
    }

    TransformEstimate est;
    try {
        est = estimate_transform(matched_pairs(current, candidate.features, matches),
                                 config_.estimate);
    } catch (const DegenerateGeometryError&) {
        entry.stage = LoopAuditEntry::Stage::rejected_degenerate;
        return {entry, std::nullopt};
    }
    entry.covariance_score = loop_covariance_score(est.covariance);
    if (entry.covariance_score > config_.thresholds.covariance_score_max) {
        entry.stage = LoopAuditEntry::Stage::rejected_covariance;
        return {entry, std::nullopt};
    }

    entry.stage = LoopAuditEntry::Stage::accepted;
    Factor factor;
    factor.kind = FactorKind::loop;
    factor.id_a = candidate.id;
    factor.id_b = current_id;
    factor.measurement = est.transform;
    factor.information = information_from_covariance(est.covariance);
    return {entry, factor};
}

std::vector<Factor> SlamSystem::find_loop_closures(const FeatureSet& features,
                                                   const BowVector& bow, int id) {
    std::vector<Factor> accepted;
    const std::vector<BowQueryResult> candidates =
        database_.query(bow, id, config_.thresholds.bow_score_min);
    for (const BowQueryResult& c : candidates) {
        auto [entry, factor] =
            gate_loop_candidate(features, id, records_[static_cast<size_t>(c.id)], c.score);
        audit_.push_back(entry);
        if (factor) {
            accepted.push_back(*factor);
        }
    }
    return accepted;
}

} // namespace gtslam
