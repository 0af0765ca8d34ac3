#pragma once

#include <complex>
#include <vector>

#include "glitchkit/image.hpp"

namespace glitchkit {

/// Unitary 2D DFT of a grayscale raster, stored DC-centered as
/// magnitude/phase pairs. Phases lie in (-pi, pi].
struct Spectrum {
    int width = 0;
    int height = 0;
    std::vector<double> magnitudes;  // row-major, all >= 0
    std::vector<double> phases;      // row-major, matching

    double magnitude_at(int u, int v) const {
        return magnitudes[static_cast<std::size_t>(v) * width + u];
    }
};

/// In-place 1D FFT, any length, O(n log n). Radix-2 lengths run directly,
/// everything else goes through a Bluestein chirp transform.
void fft(std::vector<std::complex<double>>& a, bool inverse);

/// Unitary 2D transform, 1/sqrt(MN) scaling. Exact for any size >= 8.
Spectrum dft2(const GrayImage& img);

/// Inverse of dft2; output clamped to [0,1].
GrayImage idft2(const Spectrum& spec);

}  // namespace glitchkit
