#pragma once

#include "gtslam/camera_model.hpp"
#include "gtslam/image.hpp"
#include "gtslam/points.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

namespace gtslam {

/// Keypoints and descriptor samples stay at least this many pixels away
/// from every image edge (descriptor patch half-size).
inline constexpr int kPatchMargin = 15;

/// A detected corner in pixel coordinates.
struct Keypoint {
    double px = 0.0;
    double py = 0.0;
    double response = 0.0;  // segment-test strength, higher is stronger
    double orientation = 0.0;  // intensity-centroid angle, radians
};

/// 256-bit binary descriptor.
struct Descriptor {
    std::array<uint64_t, 4> bits{};

    bool get(int i) const { return (bits[i >> 6] >> (i & 63)) & 1; }
    void set(int i) { bits[i >> 6] |= uint64_t{1} << (i & 63); }

    bool operator==(const Descriptor&) const = default;
};

inline int hamming_distance(const Descriptor& a, const Descriptor& b) {
    int d = 0;
    for (int i = 0; i < 4; ++i) {
        d += std::popcount(a.bits[i] ^ b.bits[i]);
    }
    return d;
}

/// Ground-plane keypoints with their descriptors for one observation.
/// Pixel keypoints are not retained after projection.
struct FeatureSet {
    GroundPoints points;
    std::vector<Descriptor> descriptors;

    size_t size() const { return descriptors.size(); }
    bool empty() const { return descriptors.empty(); }
};

struct DetectorConfig {
    int threshold = 20;      // min |intensity - center| for segment-test pixels
    int cell_size = 32;      // bucketing grid, one keypoint kept per cell
    int max_features = 1000;
};

/// Segment-test corner detection on a 16-pixel Bresenham circle: a corner
/// needs a contiguous arc of >= 9 pixels all brighter or all darker than the
/// center by the threshold. Response is the sum of |I - center| over that
/// arc. Corners are bucketed on a uniform grid, the best corner per cell is
/// kept, and the result is truncated to the strongest max_features.
/// Orientation is the intensity-centroid angle of a radius-15 disc patch.
/// Throws std::invalid_argument for images smaller than 64x64.
std::vector<Keypoint> detect(const Image& image, const DetectorConfig& config = {});

/// 256 pairwise comparisons of box-blurred intensities at a fixed random
/// point pattern, rotated by the keypoint orientation in 12-degree steps.
/// Throws std::invalid_argument if the keypoint violates the patch margin.
Descriptor describe(const Image& image, const Keypoint& kp);

/// detect + describe + ground projection in one call.
FeatureSet extract_features(const Image& image, const CameraModel& cam,
                            const DetectorConfig& config = {});

} // namespace gtslam
