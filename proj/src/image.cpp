#include "glitchkit/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace glitchkit {

namespace {

void check_dims(int width, int height) {
    if (width < kMinImageDim || height < kMinImageDim) {
        throw std::invalid_argument("image dims must be at least 8x8, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<Rgb> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("image data length does not match width*height");
    }
}

GrayImage::GrayImage(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("gray image data length does not match width*height");
    }
}

GrayImage to_gray(const Image& img) {
    GrayImage out(img.width(), img.height());
    const auto& src = img.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = std::clamp(luma(src[i]), 0.0, 1.0);
    }
    return out;
}

namespace {

// Shared bilinear kernel; Sampler maps (x, y) -> sample, Writer stores it.
template <typename Src, typename Get, typename Set>
void bilinear(const Src& src, int new_w, int new_h, Get get, Set set) {
    if (new_w < kMinImageDim || new_h < kMinImageDim) {
        throw std::invalid_argument("resize target dims must be at least 8x8");
    }
    const int w = src.width();
    const int h = src.height();
    // pixel-center alignment: identity when dims are unchanged
    const double sx = static_cast<double>(w) / new_w;
    const double sy = static_cast<double>(h) / new_h;
    for (int y = 0; y < new_h; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, h - 1);
        const int y1 = std::min(y0 + 1, h - 1);
        const double wy = std::clamp(fy - y0, 0.0, 1.0);
        for (int x = 0; x < new_w; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, w - 1);
            const int x1 = std::min(x0 + 1, w - 1);
            const double wx = std::clamp(fx - x0, 0.0, 1.0);
            set(x, y,
                get(x0, y0) * (1 - wx) * (1 - wy) + get(x1, y0) * wx * (1 - wy) +
                    get(x0, y1) * (1 - wx) * wy + get(x1, y1) * wx * wy);
        }
    }
}

}  // namespace

Image resize(const Image& img, int new_w, int new_h) {
    if (new_w == img.width() && new_h == img.height()) return img;
    Image out(new_w, new_h);
    for (int c = 0; c < 3; ++c) {
        bilinear(
            img, new_w, new_h,
            [&](int x, int y) {
                const Rgb& p = img.at(x, y);
                return static_cast<double>(c == 0 ? p.r : (c == 1 ? p.g : p.b));
            },
            [&](int x, int y, double v) {
                const auto q = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
                Rgb& p = out.at(x, y);
                (c == 0 ? p.r : (c == 1 ? p.g : p.b)) = q;
            });
    }
    return out;
}

GrayImage resize(const GrayImage& img, int new_w, int new_h) {
    if (new_w == img.width() && new_h == img.height()) return img;
    GrayImage out(new_w, new_h);
    bilinear(
        img, new_w, new_h, [&](int x, int y) { return img.at(x, y); },
        [&](int x, int y, double v) { out.at(x, y) = v; });
    return out;
}

}  // namespace glitchkit
