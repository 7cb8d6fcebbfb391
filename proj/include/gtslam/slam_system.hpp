#pragma once

#include "gtslam/bow_database.hpp"
#include "gtslam/camera_model.hpp"
#include "gtslam/estimation.hpp"
#include "gtslam/features.hpp"
#include "gtslam/image.hpp"
#include "gtslam/pose_graph.hpp"
#include "gtslam/vocabulary.hpp"

#include <optional>
#include <vector>

namespace gtslam {

/// The three loop-closure acceptance gates, checked in this order: BoW
/// similarity, keypoint match count, covariance score.
struct LoopThresholds {
    double bow_score_min = 0.3;
    int match_count_min = 30;
    double covariance_score_max = -3.0;
};

struct SlamConfig {
    double match_ratio = 0.7;  // descriptor ratio-test lambda
    int insertion_delay = 5;   // BoW database delay k (>= 2)
    LoopThresholds thresholds;
    EstimateConfig estimate;
    int min_odometry_matches = 10;
    DetectorConfig detector;
    bool loop_closure = true;
    Pose2 prior_pose;  // anchor for pose 0
    OptimizeConfig optimize;
};

/// Everything retained per processed observation.
struct ObservationRecord {
    int id = 0;
    FeatureSet features;
    BowVector bow;
};

struct LoopAuditEntry {
    enum class Stage { accepted, rejected_match_count, rejected_covariance, rejected_degenerate };

    int image_id = 0;
    int candidate_id = 0;
    double bow_score = 0.0;
    int match_count = -1;            // -1 if the match stage was not reached
    double covariance_score = 0.0;   // NaN if not reached, -inf if exactly certain
    Stage stage = Stage::accepted;
};

const char* to_string(LoopAuditEntry::Stage stage);

struct StepTiming {
    double extract_ms = 0.0;
    double odometry_ms = 0.0;
    double loop_ms = 0.0;
    double optimize_ms = 0.0;
};

struct OptimizationRecord {
    int image_id = 0;
    OptimizeResult result;
};

/// Inverts a covariance with its eigenvalues floored at 1e-10, so exactly
/// certain (zero) covariances still yield a finite information matrix.
Eigen::Matrix3d information_from_covariance(const Eigen::Matrix3d& covariance);

/// The per-image SLAM pipeline: feature extraction and ground projection,
/// robust local odometry against the previous observation, three-threshold
/// loop-closure detection over the BoW database, and pose-graph optimization
/// whenever a loop factor was added.
class SlamSystem {
public:
    SlamSystem(CameraModel camera, Vocabulary vocabulary, SlamConfig config = {});

    /// Odometry-only variant (no vocabulary required, no loop closures).
    SlamSystem(CameraModel camera, SlamConfig config);

    /// Extracts features from the image and processes them. Returns the
    /// current pose estimate.
    Pose2 process_image(const Image& image);

    /// Processes an already-projected observation (e.g. simulator output).
    Pose2 process_observation(FeatureSet features);

    int observation_count() const { return static_cast<int>(records_.size()); }
    const std::vector<ObservationRecord>& records() const { return records_; }
    const PoseGraph& graph() const { return graph_; }
    std::vector<Pose2> trajectory() const { return graph_.poses(); }
    const SlamConfig& config() const { return config_; }
    const CameraModel& camera() const { return camera_; }

    const std::vector<LoopAuditEntry>& loop_audit() const { return audit_; }
    const std::vector<int>& degenerate_odometry_ids() const { return degenerate_ids_; }
    const std::vector<OptimizationRecord>& optimizations() const { return optimizations_; }
    const std::vector<StepTiming>& timings() const { return timings_; }
    int loop_factor_count() const { return loop_factor_count_; }

    /// Applies the match-count and covariance gates to one BoW-accepted
    /// candidate. Pure per-candidate logic: evaluation order of candidates
    /// cannot change the outcome.
    std::pair<LoopAuditEntry, std::optional<Factor>> gate_loop_candidate(
        const FeatureSet& current, int current_id, const ObservationRecord& candidate,
        double bow_score) const;

private:
    Factor odometry_factor(const ObservationRecord& prev, const FeatureSet& current);
    std::vector<Factor> find_loop_closures(const FeatureSet& features, const BowVector& bow,
                                           int id);

    CameraModel camera_;
    Vocabulary vocabulary_;
    SlamConfig config_;
    PoseGraph graph_;
    BowDatabase database_;
    std::vector<ObservationRecord> records_;
    std::vector<LoopAuditEntry> audit_;
    std::vector<int> degenerate_ids_;
    std::vector<OptimizationRecord> optimizations_;
    std::vector<StepTiming> timings_;
    int loop_factor_count_ = 0;
};

} // namespace gtslam
