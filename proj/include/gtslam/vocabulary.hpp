#pragma once

#include "gtslam/features.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gtslam {

/// Sparse TF-IDF word-weight vector, L1-normalized unless empty.
struct BowVector {
    std::map<uint32_t, double> weights;

    bool empty() const { return weights.empty(); }

    bool operator==(const BowVector&) const = default;
};

/// Normalized BoW similarity 1 - 0.5 * |a - b|_1, in [0, 1] with 1 a perfect
/// match. Empty vectors score 0 against everything.
double bow_score(const BowVector& a, const BowVector& b);

/// Hierarchical binary vocabulary: a tree of 256-bit centroids built by
/// recursive k-medians clustering, with per-word IDF weights.
class Vocabulary {
public:
    struct Node {
        Descriptor centroid;
        uint32_t first_child = 0;
        uint32_t child_count = 0;
        int32_t word_id = -1;  // >= 0 for leaves

        bool operator==(const Node&) const = default;
    };

    Vocabulary() = default;

    /// Clusters the flattened corpus into a tree with branching factor
    /// `branching` and at most `depth` levels. Centroids are per-bit
    /// majority votes; initialization is seeded distance-weighted sampling.
    /// IDF weights are log(N_docs / n_word) over the given documents.
    /// Throws std::invalid_argument on an empty corpus or bad parameters.
    static Vocabulary build(const std::vector<std::vector<Descriptor>>& documents, int branching,
                            int depth, uint64_t seed);

    bool valid() const { return !nodes_.empty(); }
    int branching() const { return branching_; }
    int depth() const { return depth_; }
    uint32_t word_count() const { return static_cast<uint32_t>(idf_.size()); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<double>& idf() const { return idf_; }

    /// Descends the tree by nearest-centroid steps and returns the leaf word.
    uint32_t quantize(const Descriptor& d) const;

    /// TF-IDF bag-of-words vector of a descriptor list, L1-normalized.
    BowVector to_bow(const std::vector<Descriptor>& descriptors) const;

    /// Versioned binary serialization with a payload checksum.
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

    bool operator==(const Vocabulary&) const = default;

private:
    int branching_ = 0;
    int depth_ = 0;
    std::vector<Node> nodes_;  // nodes_[0] is the root
    std::vector<double> idf_;
};

} // namespace gtslam
