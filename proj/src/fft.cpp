#include "glitchkit/fft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace glitchkit {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, n a power of two.
void fft_pow2(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Precomputed chirp and convolution kernel for one (length, direction);
// image-sized transforms hit the same lengths thousands of times.
struct BluesteinPlan {
    std::size_t m = 0;
    std::vector<cd> chirp;      // length n
    std::vector<cd> kernel_ft;  // FFT of the conjugate-chirp kernel, length m
};

const BluesteinPlan& bluestein_plan(std::size_t n, bool inverse) {
    thread_local std::map<std::pair<std::size_t, bool>, BluesteinPlan> plans;
    auto [it, fresh] = plans.try_emplace({n, inverse});
    BluesteinPlan& plan = it->second;
    if (!fresh) return plan;

    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    plan.m = m;
    plan.chirp.resize(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the chirp angle accurate for large k
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        plan.chirp[k] = cd(std::cos(ang), std::sin(ang));
    }
    plan.kernel_ft.assign(m, cd(0.0));
    plan.kernel_ft[0] = std::conj(plan.chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
        plan.kernel_ft[k] = plan.kernel_ft[m - k] = std::conj(plan.chirp[k]);
    }
    fft_pow2(plan.kernel_ft, false);
    return plan;
}

// Bluestein chirp transform: exact DFT for arbitrary n via a power-of-two
// cyclic convolution of length >= 2n-1.
void fft_bluestein(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    const BluesteinPlan& plan = bluestein_plan(n, inverse);
    const std::size_t m = plan.m;

    std::vector<cd> fa(m, cd(0.0));
    for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * plan.chirp[k];
    fft_pow2(fa, false);
    for (std::size_t k = 0; k < m; ++k) fa[k] *= plan.kernel_ft[k];
    fft_pow2(fa, true);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * scale * plan.chirp[k];
}

// Transform every column of a row-major grid in place.
void fft_columns(std::vector<cd>& grid, int width, int height, bool inverse) {
    std::vector<cd> col(height);
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) col[y] = grid[static_cast<std::size_t>(y) * width + x];
        fft(col, inverse);
        for (int y = 0; y < height; ++y) grid[static_cast<std::size_t>(y) * width + x] = col[y];
    }
}

std::size_t shifted_index(int u, int v, int width, int height) {
    // DC-centering: raw bin (u,v) lands at ((u + w/2) mod w, (v + h/2) mod h)
    const int su = (u + width / 2) % width;
    const int sv = (v + height / 2) % height;
    return static_cast<std::size_t>(sv) * width + su;
}

}  // namespace

void fft(std::vector<cd>& a, bool inverse) {
    if (a.size() <= 1) return;
    if (is_pow2(a.size())) {
        fft_pow2(a, inverse);
    } else {
        fft_bluestein(a, inverse);
    }
}

Spectrum dft2(const GrayImage& img) {
    const int w = img.width();
    const int h = img.height();
    std::vector<cd> grid(img.data().begin(), img.data().end());

    std::vector<cd> row(w);
    for (int y = 0; y < h; ++y) {
        auto* begin = grid.data() + static_cast<std::size_t>(y) * w;
        row.assign(begin, begin + w);
        fft(row, false);
        std::copy(row.begin(), row.end(), begin);
    }
    fft_columns(grid, w, h, false);

    Spectrum spec;
    spec.width = w;
    spec.height = h;
    spec.magnitudes.resize(grid.size());
    spec.phases.resize(grid.size());
    const double norm = 1.0 / std::sqrt(static_cast<double>(w) * h);
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const cd f = grid[static_cast<std::size_t>(v) * w + u] * norm;
            const std::size_t at = shifted_index(u, v, w, h);
            spec.magnitudes[at] = std::abs(f);
            double ph = std::arg(f);
            if (ph <= -kPi) ph = kPi;
            spec.phases[at] = ph;
        }
    }
    return spec;
}

GrayImage idft2(const Spectrum& spec) {
    const int w = spec.width;
    const int h = spec.height;
    if (w <= 0 || h <= 0 ||
        spec.magnitudes.size() != static_cast<std::size_t>(w) * h ||
        spec.phases.size() != spec.magnitudes.size()) {
        throw std::invalid_argument("idft2: malformed spectrum");
    }

    std::vector<cd> grid(static_cast<std::size_t>(w) * h);
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const std::size_t at = shifted_index(u, v, w, h);
            grid[static_cast<std::size_t>(v) * w + u] =
                std::polar(spec.magnitudes[at], spec.phases[at]);
        }
    }

    std::vector<cd> row(w);
    for (int y = 0; y < h; ++y) {
        auto* begin = grid.data() + static_cast<std::size_t>(y) * w;
        row.assign(begin, begin + w);
        fft(row, true);
        std::copy(row.begin(), row.end(), begin);
    }
    fft_columns(grid, w, h, true);

    GrayImage out(w, h);
    const double norm = 1.0 / std::sqrt(static_cast<double>(w) * h);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.data()[i] = std::clamp(grid[i].real() * norm, 0.0, 1.0);
    }
    return out;
}

}  // namespace glitchkit
