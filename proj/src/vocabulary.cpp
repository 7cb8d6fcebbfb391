#include "gtslam/vocabulary.hpp"

#include "gtslam/errors.hpp"
#include "gtslam/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

namespace gtslam {

double bow_score(const BowVector& a, const BowVector& b) {
    if (a.empty() || b.empty()) {
        return 0.0;
    }
    double l1 = 0.0;
    auto ia = a.weights.begin();
    auto ib = b.weights.begin();
    while (ia != a.weights.end() && ib != b.weights.end()) {
        if (ia->first < ib->first) {
            l1 += ia->second;
            ++ia;
        } else if (ib->first < ia->first) {
            l1 += ib->second;
            ++ib;
        } else {
            l1 += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    for (; ia != a.weights.end(); ++ia) {
        l1 += ia->second;
    }
    for (; ib != b.weights.end(); ++ib) {
        l1 += ib->second;
    }
    return std::clamp(1.0 - 0.5 * l1, 0.0, 1.0);
}

namespace {

// Per-bit majority vote; ties resolve to 0.
Descriptor majority_centroid(const std::vector<Descriptor>& corpus,
                             const std::vector<uint32_t>& members) {
    int counts[256] = {};
    for (const uint32_t m : members) {
        for (int bit = 0; bit < 256; ++bit) {
            counts[bit] += corpus[m].get(bit);
        }
    }
    Descriptor c;
    const int m = static_cast<int>(members.size());
    for (int bit = 0; bit < 256; ++bit) {
        if (2 * counts[bit] > m) {
            c.set(bit);
        }
    }
    return c;
}

// Distance-weighted (k-medians++) seeding over the member descriptors.
std::vector<Descriptor> seed_centroids(const std::vector<Descriptor>& corpus,
                                       const std::vector<uint32_t>& members, int k, Rng& rng) {
    std::vector<Descriptor> centroids;
    centroids.reserve(static_cast<size_t>(k));
    centroids.push_back(corpus[members[rng.uniform_index(members.size())]]);

    std::vector<int> dist(members.size());
    for (size_t i = 0; i < members.size(); ++i) {
        dist[i] = hamming_distance(corpus[members[i]], centroids[0]);
    }
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (const int d : dist) {
            total += d;
        }
        size_t pick = members.size();
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double cum = 0.0;
            for (size_t i = 0; i < members.size(); ++i) {
                cum += dist[i];
                if (r < cum) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick == members.size()) {
            // All mass on existing centroids; take the first distinct leftover.
            for (size_t i = 0; i < members.size(); ++i) {
                if (dist[i] > 0) {
                    pick = i;
                    break;
                }
            }
            if (pick == members.size()) {
                break;  // fewer distinct descriptors than requested clusters
            }
        }
        centroids.push_back(corpus[members[pick]]);
        for (size_t i = 0; i < members.size(); ++i) {
            dist[i] = std::min(dist[i], hamming_distance(corpus[members[i]], centroids.back()));
        }
    }
    return centroids;
}

int nearest_centroid(const Descriptor& d, const std::vector<Descriptor>& centroids) {
    int best = 0;
    int best_dist = hamming_distance(d, centroids[0]);
    for (size_t c = 1; c < centroids.size(); ++c) {
        const int dist = hamming_distance(d, centroids[c]);
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<int>(c);
        }
    }
    return best;
}

// One k-medians run; returns final centroids and their member lists, with
// empty clusters dropped. Assignments are consistent with the returned
// centroids, so tree descent reproduces the clustering.
void kmedians(const std::vector<Descriptor>& corpus, const std::vector<uint32_t>& members, int k,
              Rng& rng, std::vector<Descriptor>& centroids,
              std::vector<std::vector<uint32_t>>& clusters) {
    centroids = seed_centroids(corpus, members, k, rng);
    constexpr int kMaxRounds = 25;

    std::vector<int> assignment(members.size(), -1);
    for (int round = 0; round < kMaxRounds; ++round) {
        for (size_t i = 0; i < members.size(); ++i) {
            assignment[i] = nearest_centroid(corpus[members[i]], centroids);
        }
        // Re-seed starved clusters with the point farthest from its centroid.
        for (size_t c = 0; c < centroids.size(); ++c) {
            if (std::find(assignment.begin(), assignment.end(), static_cast<int>(c)) !=
                assignment.end()) {
                continue;
            }
            int far_dist = -1;
            size_t far_index = 0;
            for (size_t i = 0; i < members.size(); ++i) {
                const int d = hamming_distance(corpus[members[i]],
                                               centroids[static_cast<size_t>(assignment[i])]);
                if (d > far_dist) {
                    far_dist = d;
                    far_index = i;
                }
            }
            centroids[c] = corpus[members[far_index]];
            assignment[far_index] = static_cast<int>(c);
        }

        bool changed = false;
        for (size_t c = 0; c < centroids.size(); ++c) {
            std::vector<uint32_t> cluster_members;
            for (size_t i = 0; i < members.size(); ++i) {
                if (assignment[i] == static_cast<int>(c)) {
                    cluster_members.push_back(members[i]);
                }
            }
            if (cluster_members.empty()) {
                continue;
            }
            const Descriptor updated = majority_centroid(corpus, cluster_members);
            if (!(updated == centroids[c])) {
                centroids[c] = updated;
                changed = true;
            }
        }
        if (!changed) {
            break;
        }
    }

    // Final assignment against the returned centroids.
    clusters.assign(centroids.size(), {});
    for (const uint32_t m : members) {
        clusters[static_cast<size_t>(nearest_centroid(corpus[m], centroids))].push_back(m);
    }
    // Drop starved clusters.
    for (size_t c = centroids.size(); c-- > 0;) {
        if (clusters[c].empty()) {
            centroids.erase(centroids.begin() + static_cast<long>(c));
            clusters.erase(clusters.begin() + static_cast<long>(c));
        }
    }
}

size_t count_distinct(const std::vector<Descriptor>& corpus, const std::vector<uint32_t>& members) {
    std::set<std::array<uint64_t, 4>> seen;
    for (const uint32_t m : members) {
        seen.insert(corpus[m].bits);
        if (seen.size() > 64) {
            break;  // plenty; callers only compare against the branching factor
        }
    }
    return seen.size();
}

// Serialization helpers (explicit little-endian).
void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void put_f64(std::string& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

class Reader {
public:
    Reader(const std::string& data, size_t offset) : data_(data), pos_(offset) {}

    uint32_t u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<uint32_t>(byte()) << (8 * i);
        }
        return v;
    }
    uint64_t u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<uint64_t>(byte()) << (8 * i);
        }
        return v;
    }
    double f64() {
        const uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }

private:
    uint8_t byte() {
        if (pos_ >= data_.size()) {
            throw Error("vocabulary file truncated");
        }
        return static_cast<uint8_t>(data_[pos_++]);
    }

    const std::string& data_;
    size_t pos_;
};

uint64_t fnv1a(const char* data, size_t n) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < n; ++i) {
        h ^= static_cast<uint8_t>(data[i]);
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr char kVocabMagic[8] = {'G', 'T', 'S', 'V', 'O', 'C', 'A', 'B'};
constexpr uint32_t kVocabVersion = 1;

} // namespace

Vocabulary Vocabulary::build(const std::vector<std::vector<Descriptor>>& documents, int branching,
                             int depth, uint64_t seed) {
    if (branching < 2 || depth < 1) {
        throw std::invalid_argument("Vocabulary::build: need branching >= 2 and depth >= 1");
    }
    std::vector<Descriptor> corpus;
    for (const auto& doc : documents) {
        corpus.insert(corpus.end(), doc.begin(), doc.end());
    }
    if (corpus.empty()) {
        throw std::invalid_argument("Vocabulary::build: empty corpus");
    }

    Vocabulary vocab;
    vocab.branching_ = branching;
    vocab.depth_ = depth;
    vocab.nodes_.push_back({});

    Rng rng(seed);
    uint32_t next_word = 0;

    // Iterative DFS so huge corpora cannot overflow the stack. Children of a
    // node are contiguous, which the serialized format relies on.
    struct Task {
        uint32_t node;
        std::vector<uint32_t> members;
        int level;
    };
    std::vector<uint32_t> all(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        all[i] = static_cast<uint32_t>(i);
    }
    std::vector<Task> stack;
    stack.push_back({0, std::move(all), 0});
    while (!stack.empty()) {
        Task task = std::move(stack.back());
        stack.pop_back();

        const size_t distinct = count_distinct(corpus, task.members);
        if (task.level >= depth || distinct <= 1) {
            vocab.nodes_[task.node].word_id = static_cast<int32_t>(next_word++);
            continue;
        }

        std::vector<Descriptor> centroids;
        std::vector<std::vector<uint32_t>> clusters;
        kmedians(corpus, task.members, std::min<int>(branching, static_cast<int>(distinct)), rng,
                 centroids, clusters);

        const uint32_t first_child = static_cast<uint32_t>(vocab.nodes_.size());
        vocab.nodes_[task.node].first_child = first_child;
        vocab.nodes_[task.node].child_count = static_cast<uint32_t>(centroids.size());
        for (const Descriptor& c : centroids) {
            Node child;
            child.centroid = c;
            vocab.nodes_.push_back(child);
        }
        // Push in reverse so DFS visits children (and assigns word ids) in order.
        for (size_t c = centroids.size(); c-- > 0;) {
            stack.push_back({first_child + static_cast<uint32_t>(c), std::move(clusters[c]),
                             task.level + 1});
        }
    }

    // IDF over the corpus documents.
    std::vector<uint32_t> docs_with_word(next_word, 0);
    size_t n_docs = 0;
    for (const auto& doc : documents) {
        if (doc.empty()) {
            continue;
        }
        ++n_docs;
        std::set<uint32_t> words;
        for (const Descriptor& d : doc) {
            words.insert(vocab.quantize(d));
        }
        for (const uint32_t w : words) {
            ++docs_with_word[w];
        }
    }
    vocab.idf_.resize(next_word, 0.0);
    for (uint32_t w = 0; w < next_word; ++w) {
        if (docs_with_word[w] > 0) {
            vocab.idf_[w] = std::log(static_cast<double>(n_docs) / docs_with_word[w]);
        }
    }
    return vocab;
}

uint32_t Vocabulary::quantize(const Descriptor& d) const {
    if (nodes_.empty()) {
        throw Error("Vocabulary::quantize: vocabulary not built");
    }
    uint32_t node = 0;
    while (nodes_[node].child_count > 0) {
        const uint32_t first = nodes_[node].first_child;
        uint32_t best = first;
        int best_dist = hamming_distance(d, nodes_[first].centroid);
        for (uint32_t c = 1; c < nodes_[node].child_count; ++c) {
            const int dist = hamming_distance(d, nodes_[first + c].centroid);
            if (dist < best_dist) {
                best_dist = dist;
                best = first + c;
            }
        }
        node = best;
    }
    return static_cast<uint32_t>(nodes_[node].word_id);
}

BowVector Vocabulary::to_bow(const std::vector<Descriptor>& descriptors) const {
    BowVector bow;
    if (descriptors.empty()) {
        return bow;
    }
    std::map<uint32_t, uint32_t> counts;
    for (const Descriptor& d : descriptors) {
        ++counts[quantize(d)];
    }
    double sum = 0.0;
    for (const auto& [word, count] : counts) {
        const double w = (static_cast<double>(count) / descriptors.size()) * idf_[word];
        if (w > 0.0) {
            bow.weights[word] = w;
            sum += w;
        }
    }
    for (auto& [word, w] : bow.weights) {
        w /= sum;
    }
    return bow;
}

void Vocabulary::save(const std::string& path) const {
    std::string payload;
    payload.reserve(nodes_.size() * 44 + idf_.size() * 8);
    for (const Node& n : nodes_) {
        for (const uint64_t w : n.centroid.bits) {
            put_u64(payload, w);
        }
        put_u32(payload, n.first_child);
        put_u32(payload, n.child_count);
        put_u32(payload, static_cast<uint32_t>(n.word_id));
    }
    for (const double v : idf_) {
        put_f64(payload, v);
    }

    std::string header(kVocabMagic, sizeof(kVocabMagic));
    put_u32(header, kVocabVersion);
    put_u32(header, static_cast<uint32_t>(branching_));
    put_u32(header, static_cast<uint32_t>(depth_));
    put_u32(header, word_count());
    put_u32(header, static_cast<uint32_t>(nodes_.size()));
    put_u64(header, fnv1a(payload.data(), payload.size()));

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write vocabulary: " + path);
    }
    out << header << payload;
    if (!out) {
        throw Error("failed writing vocabulary: " + path);
    }
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open vocabulary: " + path);
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 36 || std::memcmp(data.data(), kVocabMagic, sizeof(kVocabMagic)) != 0) {
        throw Error("not a vocabulary file: " + path);
    }
    Reader r(data, sizeof(kVocabMagic));
    const uint32_t version = r.u32();
    if (version != kVocabVersion) {
        throw Error("unsupported vocabulary version in " + path);
    }
    Vocabulary vocab;
    vocab.branching_ = static_cast<int>(r.u32());
    vocab.depth_ = static_cast<int>(r.u32());
    const uint32_t words = r.u32();
    const uint32_t node_count = r.u32();
    const uint64_t checksum = r.u64();

    constexpr size_t kHeaderSize = 36;
    if (fnv1a(data.data() + kHeaderSize, data.size() - kHeaderSize) != checksum) {
        throw Error("vocabulary checksum mismatch: " + path);
    }

    Reader body(data, kHeaderSize);
    vocab.nodes_.resize(node_count);
    for (Node& n : vocab.nodes_) {
        for (uint64_t& w : n.centroid.bits) {
            w = body.u64();
        }
        n.first_child = body.u32();
        n.child_count = body.u32();
        n.word_id = body.i32();
        if (n.first_child + n.child_count > node_count) {
            throw Error("vocabulary node table corrupt: " + path);
        }
    }
    vocab.idf_.resize(words);
    for (double& v : vocab.idf_) {
        v = body.f64();
    }
    return vocab;
}

} // namespace gtslam
