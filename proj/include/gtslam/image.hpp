#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gtslam {

/// 8-bit grayscale image, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;

    Image() = default;
    Image(int w, int h, uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    uint8_t at(int x, int y) const {
        return pixels[static_cast<size_t>(y) * width + x];
    }
    void set(int x, int y, uint8_t v) {
        pixels[static_cast<size_t>(y) * width + x] = v;
    }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
};

/// Reads a binary (P5) PGM file.
Image read_pgm(const std::string& path);

/// Writes a binary (P5) PGM file with maxval 255.
void write_pgm(const Image& img, const std::string& path);

/// Reads an 8-bit PNG, converting color images to grayscale.
Image read_png(const std::string& path);

/// Reads PGM or PNG based on the file extension.
Image read_image(const std::string& path);

} // namespace gtslam
