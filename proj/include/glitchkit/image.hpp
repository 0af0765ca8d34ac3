#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace glitchkit {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

inline constexpr int kMinImageDim = 8;

/// Owned 8-bit RGB raster, row-major. Immutable by convention once built;
/// generators copy-on-write. Minimum size 8x8: features and generators
/// assume non-degenerate rasters.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = Rgb{});
    Image(int width, int height, std::vector<Rgb> data);

    int width() const { return width_; }
    int height() const { return height_; }

    const Rgb& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    Rgb& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    bool contains(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

    const std::vector<Rgb>& data() const { return data_; }
    std::vector<Rgb>& data() { return data_; }

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> data_;
};

/// Row-major real-valued intensity raster in [0,1].
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0);
    GrayImage(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }

    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// ITU-R BT.601 luma of one pixel, result in [0,1].
inline double luma(const Rgb& p) {
    return (0.299 * p.r + 0.587 * p.g + 0.114 * p.b) / 255.0;
}

GrayImage to_gray(const Image& img);

/// Bilinear resize. Target dims must be >= 8.
Image resize(const Image& img, int new_w, int new_h);
GrayImage resize(const GrayImage& img, int new_w, int new_h);

}  // namespace glitchkit
