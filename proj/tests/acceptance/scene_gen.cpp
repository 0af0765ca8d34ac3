#include "scene_gen.hpp"

#include <algorithm>
#include <cmath>

#include "glitchkit/rng.hpp"

namespace glitchkit::scenegen {

namespace {

struct Palette {
    Rgb sky_a, sky_b, accent;
    double ripple_freq;
    bool hud_bar;
};

// one visual identity per source
const Palette kPalettes[] = {
    {{30, 40, 90}, {120, 150, 210}, {220, 180, 80}, 0.045, true},    // dusk city
    {{15, 70, 30}, {110, 190, 120}, {200, 60, 50}, 0.020, false},    // forest
    {{95, 40, 25}, {230, 150, 90}, {60, 90, 170}, 0.070, true},      // canyon
    {{25, 25, 35}, {90, 80, 130}, {240, 240, 200}, 0.100, false},    // night interior
    {{60, 110, 140}, {180, 220, 235}, {250, 120, 40}, 0.030, true},  // coast
    {{80, 80, 80}, {190, 190, 200}, {120, 200, 90}, 0.055, false},   // industrial
};

std::uint8_t mix(std::uint8_t a, std::uint8_t b, double t) {
    return static_cast<std::uint8_t>(std::clamp(a + (b - a) * t, 0.0, 255.0));
}

Rgb mix(const Rgb& a, const Rgb& b, double t) {
    return Rgb{mix(a.r, b.r, t), mix(a.g, b.g, t), mix(a.b, b.b, t)};
}

// cheap deterministic per-pixel hash noise
inline int hash_noise(std::uint64_t seed, int x, int y) {
    std::uint64_t z = seed ^ (std::uint64_t(x) * 0x9e3779b97f4a7c15ULL) ^
                      (std::uint64_t(y) * 0xbf58476d1ce4e5b9ULL);
    z = (z ^ (z >> 30)) * 0x94d049bb133111ebULL;
    return static_cast<int>((z >> 59)) - 16;  // [-16, 15]
}

}  // namespace

Image render_frame(int source, int frame, int width, int height, std::uint64_t seed) {
    const Palette& pal = kPalettes[source % 6];
    Rng rng(Rng(seed).child(static_cast<std::uint64_t>(source) * 100000 + frame).seed());

    const double grad_tilt = rng.uniform(0.3, 0.9);
    const double phase = rng.uniform(0.0, 6.28318);
    const double ripple_y = pal.ripple_freq * rng.uniform(0.6, 1.4);

    Image img(width, height);
    for (int y = 0; y < height; ++y) {
        const double fy = static_cast<double>(y) / height;
        for (int x = 0; x < width; ++x) {
            const double fx = static_cast<double>(x) / width;
            const double t = std::clamp(fy * grad_tilt + fx * (1.0 - grad_tilt), 0.0, 1.0);
            Rgb c = mix(pal.sky_a, pal.sky_b, t);
            const double ripple =
                0.5 + 0.5 * std::sin(phase + x * pal.ripple_freq + y * ripple_y);
            c = mix(c, pal.accent, 0.12 * ripple);
            const int n = hash_noise(rng.seed(), x, y) / 3;
            c.r = static_cast<std::uint8_t>(std::clamp(c.r + n, 0, 255));
            c.g = static_cast<std::uint8_t>(std::clamp(c.g + n, 0, 255));
            c.b = static_cast<std::uint8_t>(std::clamp(c.b + n, 0, 255));
            img.at(x, y) = c;
        }
    }

    // scenery blobs: soft-edged ellipses in palette tints
    const int blobs = static_cast<int>(rng.uniform_int(8, 16));
    for (int i = 0; i < blobs; ++i) {
        const int cx = static_cast<int>(rng.uniform_int(0, width - 1));
        const int cy = static_cast<int>(rng.uniform_int(height / 4, height - 1));
        const int ax = std::max(8, static_cast<int>(rng.uniform(0.02, 0.10) * width));
        const int ay = std::max(8, static_cast<int>(rng.uniform(0.03, 0.14) * height));
        const Rgb tint = mix(pal.accent, rng.coin_flip() ? pal.sky_a : pal.sky_b,
                             rng.uniform(0.2, 0.8));
        const double opacity = rng.uniform(0.45, 0.9);
        for (int y = std::max(0, cy - ay); y <= std::min(height - 1, cy + ay); ++y) {
            for (int x = std::max(0, cx - ax); x <= std::min(width - 1, cx + ax); ++x) {
                const double dx = double(x - cx) / ax;
                const double dy = double(y - cy) / ay;
                const double d = dx * dx + dy * dy;
                if (d > 1.0) continue;
                const double a = opacity * (1.0 - 0.6 * d);  // soft edge
                img.at(x, y) = mix(img.at(x, y), tint, a);
            }
        }
    }

    // boxy structures (buildings / UI panels)
    const int rects = static_cast<int>(rng.uniform_int(2, 6));
    for (int i = 0; i < rects; ++i) {
        const int rw = std::max(12, static_cast<int>(rng.uniform(0.04, 0.18) * width));
        const int rh = std::max(12, static_cast<int>(rng.uniform(0.05, 0.30) * height));
        const int rx = static_cast<int>(rng.uniform_int(0, std::max(0, width - rw)));
        const int ry = static_cast<int>(rng.uniform_int(height / 3, std::max(height / 3, height - rh)));
        const Rgb fill = mix(pal.sky_a, pal.accent, rng.uniform(0.1, 0.5));
        for (int y = ry; y < std::min(height, ry + rh); ++y) {
            for (int x = rx; x < std::min(width, rx + rw); ++x) {
                img.at(x, y) = mix(img.at(x, y), fill, 0.85);
            }
        }
    }

    // HUD bar habit for some sources
    if (pal.hud_bar) {
        const int bar_h = std::max(6, height / 18);
        const Rgb bar = mix(Rgb{20, 20, 24}, pal.accent, 0.15);
        for (int y = height - bar_h; y < height; ++y) {
            for (int x = 0; x < width; ++x) img.at(x, y) = mix(img.at(x, y), bar, 0.8);
        }
    }
    return img;
}

}  // namespace glitchkit::scenegen
