#pragma once

#include "gtslam/vocabulary.hpp"

#include <vector>

namespace gtslam {

struct BowQueryResult {
    int id = 0;
    double score = 0.0;
};

/// Ordered store of (observation id, BoW vector) entries with delayed query
/// visibility: a query at observation n only sees entries with id <= n - k,
/// which keeps trivially adjacent observations out of loop-closure search.
class BowDatabase {
public:
    explicit BowDatabase(int insertion_delay);

    /// Ids must be strictly increasing.
    void insert(int id, BowVector bow);

    /// All visible entries scoring at least min_score against the query,
    /// sorted by descending score (ties by ascending id).
    std::vector<BowQueryResult> query(const BowVector& bow, int current_id,
                                      double min_score) const;

    int delay() const { return delay_; }
    size_t size() const { return entries_.size(); }

private:
    int delay_;
    std::vector<std::pair<int, BowVector>> entries_;
};

} // namespace gtslam
