#pragma once

#include "gtslam/features.hpp"

#include <vector>

namespace gtslam {

/// A correspondence between a query and a train descriptor.
struct Match {
    int query_index = 0;
    int train_index = 0;
    int distance = 0;  // Hamming, in [0, 256]

    bool operator==(const Match&) const = default;
};

/// Exact 2-nearest-neighbor Hamming matching with the ratio test: the best
/// train neighbor f0 is kept iff f0 <= ratio * f1 where f1 is the
/// second-best distance. Ties are broken toward the lowest train index.
/// Throws std::invalid_argument if query is empty, train has fewer than two
/// descriptors, or ratio is outside (0, 1].
std::vector<Match> match(const FeatureSet& query, const FeatureSet& train, double ratio);

} // namespace gtslam
