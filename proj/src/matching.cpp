#include "gtslam/matching.hpp"

#include <limits>
#include <stdexcept>

namespace gtslam {

std::vector<Match> match(const FeatureSet& query, const FeatureSet& train, double ratio) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw std::invalid_argument("match: ratio must be in (0, 1]");
    }
    if (query.empty()) {
        throw std::invalid_argument("match: query set is empty");
    }
    if (train.size() < 2) {
        throw std::invalid_argument("match: need at least two train descriptors for the ratio test");
    }

    std::vector<Match> matches;
    matches.reserve(query.size());
    for (size_t q = 0; q < query.size(); ++q) {
        int best = std::numeric_limits<int>::max();
        int second = std::numeric_limits<int>::max();
        int best_index = -1;
        for (size_t t = 0; t < train.size(); ++t) {
            const int d = hamming_distance(query.descriptors[q], train.descriptors[t]);
            if (d < best) {
                second = best;
                best = d;
                best_index = static_cast<int>(t);
            } else if (d < second) {
                second = d;
            }
        }
        if (best <= ratio * second) {
            matches.push_back({static_cast<int>(q), best_index, best});
        }
    }
    return matches;
}

} // namespace gtslam
