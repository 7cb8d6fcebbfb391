#include "gtslam/features.hpp"

#include "gtslam/projection.hpp"
#include "gtslam/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace gtslam {

namespace {

// 16-pixel Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr int kCircle[16][2] = {
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};

constexpr int kMinArc = 9;

// Longest circular run of `value` in flags[16]; returns {length, start}.
std::pair<int, int> longest_run(const int flags[16], int value) {
    int best_len = 0, best_start = 0;
    int len = 0, start = 0;
    for (int i = 0; i < 32; ++i) {
        if (flags[i & 15] == value) {
            if (len == 0) {
                start = i;
            }
            ++len;
            if (len > best_len) {
                best_len = len;
                best_start = start;
            }
        } else {
            len = 0;
        }
    }
    return {std::min(best_len, 16), best_start & 15};
}

double centroid_orientation(const Image& img, int cx, int cy) {
    double m10 = 0.0, m01 = 0.0;
    for (int dy = -kPatchMargin; dy <= kPatchMargin; ++dy) {
        for (int dx = -kPatchMargin; dx <= kPatchMargin; ++dx) {
            if (dx * dx + dy * dy > kPatchMargin * kPatchMargin) {
                continue;
            }
            const double v = img.at(cx + dx, cy + dy);
            m10 += dx * v;
            m01 += dy * v;
        }
    }
    if (m10 == 0.0 && m01 == 0.0) {
        return 0.0;
    }
    return std::atan2(m01, m10);
}

// Fixed descriptor comparison pattern: 256 point pairs drawn uniformly from
// the radius-13 disc with a recorded seed, plus the 30 rotated copies used
// for the 12-degree orientation bins.
constexpr uint64_t kPatternSeed = 0x67741205u;
constexpr int kOrientationBins = 30;
constexpr int kPatternRadius = 13;

struct PatternPoint {
    int8_t x, y;
};

struct PatternTable {
    // [bin][pair][0 = p, 1 = q]
    PatternPoint pts[kOrientationBins][256][2];
};

PatternPoint draw_disc_point(Rng& rng) {
    while (true) {
        const int x = static_cast<int>(rng.uniform_index(2 * kPatternRadius + 1)) - kPatternRadius;
        const int y = static_cast<int>(rng.uniform_index(2 * kPatternRadius + 1)) - kPatternRadius;
        if (x * x + y * y <= kPatternRadius * kPatternRadius) {
            return {static_cast<int8_t>(x), static_cast<int8_t>(y)};
        }
    }
}

const PatternTable& pattern_table() {
    static const PatternTable table = [] {
        PatternTable t;
        Rng rng(kPatternSeed);
        PatternPoint base[256][2];
        for (auto& pair : base) {
            pair[0] = draw_disc_point(rng);
            do {
                pair[1] = draw_disc_point(rng);
            } while (pair[1].x == pair[0].x && pair[1].y == pair[0].y);
        }
        for (int b = 0; b < kOrientationBins; ++b) {
            const double a = 2.0 * M_PI * b / kOrientationBins;
            const double c = std::cos(a), s = std::sin(a);
            for (int i = 0; i < 256; ++i) {
                for (int j = 0; j < 2; ++j) {
                    const double x = base[i][j].x, y = base[i][j].y;
                    t.pts[b][i][j] = {static_cast<int8_t>(std::lround(c * x - s * y)),
                                      static_cast<int8_t>(std::lround(s * x + c * y))};
                }
            }
        }
        return t;
    }();
    return table;
}

// 5x5 box sum; comparing sums is equivalent to comparing blurred means.
int box_sum(const Image& img, int x, int y) {
    int sum = 0;
    for (int dy = -2; dy <= 2; ++dy) {
        const uint8_t* row = img.pixels.data() + static_cast<size_t>(y + dy) * img.width;
        for (int dx = -2; dx <= 2; ++dx) {
            sum += row[x + dx];
        }
    }
    return sum;
}

} // namespace

std::vector<Keypoint> detect(const Image& image, const DetectorConfig& config) {
    if (image.width < 64 || image.height < 64) {
        throw std::invalid_argument("detect: image must be at least 64x64");
    }
    if (config.cell_size < 1 || config.max_features < 1) {
        throw std::invalid_argument("detect: invalid detector config");
    }

    struct Corner {
        int x, y;
        double response;
    };
    // Best corner per bucket cell, keyed by (cell_y, cell_x).
    std::map<std::pair<int, int>, Corner> cells;

    const int t = config.threshold;
    for (int y = kPatchMargin; y < image.height - kPatchMargin; ++y) {
        for (int x = kPatchMargin; x < image.width - kPatchMargin; ++x) {
            const int c = image.at(x, y);
            int flags[16];
            for (int i = 0; i < 16; ++i) {
                const int v = image.at(x + kCircle[i][0], y + kCircle[i][1]);
                flags[i] = v > c + t ? 1 : (v < c - t ? -1 : 0);
            }
            double response = 0.0;
            for (const int polarity : {1, -1}) {
                const auto [len, start] = longest_run(flags, polarity);
                if (len >= kMinArc) {
                    for (int i = 0; i < len; ++i) {
                        const int idx = (start + i) & 15;
                        response += std::abs(image.at(x + kCircle[idx][0], y + kCircle[idx][1]) - c);
                    }
                    break;  // arcs of both polarities cannot both reach 9 of 16
                }
            }
            if (response <= 0.0) {
                continue;
            }
            const auto key = std::make_pair(y / config.cell_size, x / config.cell_size);
            const auto it = cells.find(key);
            if (it == cells.end() || response > it->second.response) {
                cells[key] = {x, y, response};
            }
        }
    }

    std::vector<Corner> winners;
    winners.reserve(cells.size());
    for (const auto& [key, corner] : cells) {
        winners.push_back(corner);
    }
    std::sort(winners.begin(), winners.end(), [](const Corner& a, const Corner& b) {
        if (a.response != b.response) {
            return a.response > b.response;
        }
        return std::tie(a.y, a.x) < std::tie(b.y, b.x);
    });
    if (winners.size() > static_cast<size_t>(config.max_features)) {
        winners.resize(static_cast<size_t>(config.max_features));
    }

    std::vector<Keypoint> keypoints;
    keypoints.reserve(winners.size());
    for (const Corner& c : winners) {
        keypoints.push_back({static_cast<double>(c.x), static_cast<double>(c.y), c.response,
                             centroid_orientation(image, c.x, c.y)});
    }
    return keypoints;
}

Descriptor describe(const Image& image, const Keypoint& kp) {
    const int x = static_cast<int>(std::lround(kp.px));
    const int y = static_cast<int>(std::lround(kp.py));
    if (x < kPatchMargin || x >= image.width - kPatchMargin || y < kPatchMargin ||
        y >= image.height - kPatchMargin) {
        throw std::invalid_argument("describe: keypoint violates the patch margin");
    }

    double a = std::fmod(kp.orientation, 2.0 * M_PI);
    if (a < 0.0) {
        a += 2.0 * M_PI;
    }
    const int bin =
        static_cast<int>(std::lround(a * kOrientationBins / (2.0 * M_PI))) % kOrientationBins;

    const auto& pattern = pattern_table().pts[bin];
    Descriptor d;
    for (int i = 0; i < 256; ++i) {
        const int p = box_sum(image, x + pattern[i][0].x, y + pattern[i][0].y);
        const int q = box_sum(image, x + pattern[i][1].x, y + pattern[i][1].y);
        if (p < q) {
            d.set(i);
        }
    }
    return d;
}

FeatureSet extract_features(const Image& image, const CameraModel& cam,
                            const DetectorConfig& config) {
    const std::vector<Keypoint> keypoints = detect(image, config);

    FeatureSet out;
    out.descriptors.reserve(keypoints.size());
    Eigen::Matrix2Xd px(2, static_cast<Eigen::Index>(keypoints.size()));
    for (size_t i = 0; i < keypoints.size(); ++i) {
        px(0, static_cast<Eigen::Index>(i)) = keypoints[i].px;
        px(1, static_cast<Eigen::Index>(i)) = keypoints[i].py;
        out.descriptors.push_back(describe(image, keypoints[i]));
    }
    out.points = project_keypoints(PixelPoints(px), cam);
    return out;
}

} // namespace gtslam
