#include "gtslam/bow_database.hpp"

#include <algorithm>
#include <stdexcept>

namespace gtslam {

BowDatabase::BowDatabase(int insertion_delay) : delay_(insertion_delay) {
    if (insertion_delay < 1) {
        throw std::invalid_argument("BowDatabase: insertion delay must be >= 1");
    }
}

void BowDatabase::insert(int id, BowVector bow) {
    if (!entries_.empty() && id <= entries_.back().first) {
        throw std::invalid_argument("BowDatabase: ids must be strictly increasing");
    }
    entries_.emplace_back(id, std::move(bow));
}

std::vector<BowQueryResult> BowDatabase::query(const BowVector& bow, int current_id,
                                               double min_score) const {
    std::vector<BowQueryResult> results;
    for (const auto& [id, entry] : entries_) {
        if (id > current_id - delay_) {
            break;  // entries are ordered by id
        }
        const double score = bow_score(bow, entry);
        if (score >= min_score) {
            results.push_back({id, score});
        }
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const BowQueryResult& a, const BowQueryResult& b) {
                         return a.score > b.score;
                     });
    return results;
}

} // namespace gtslam
