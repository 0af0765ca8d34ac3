#include "glitchkit/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace glitchkit {

namespace {
constexpr double kPi = std::numbers::pi;
}

HogDescriptor hog(const GrayImage& img, const HogConfig& cfg) {
    if (cfg.bins < 2) throw std::invalid_argument("hog: needs at least 2 bins");
    if (cfg.patch < 2) throw std::invalid_argument("hog: patch must be at least 2");
    if (cfg.patch > img.width() || cfg.patch > img.height()) {
        throw std::invalid_argument("hog: patch larger than image");
    }

    const int cols = img.width() / cfg.patch;
    const int rows = img.height() / cfg.patch;
    // center crop to a patch multiple
    const int x_off = (img.width() - cols * cfg.patch) / 2;
    const int y_off = (img.height() - rows * cfg.patch) / 2;

    const int n = cfg.bins;
    const double bin_width = kPi / n;

    HogDescriptor out;
    out.patch_rows = rows;
    out.patch_cols = cols;
    out.bins_per_patch = n;
    out.values.assign(static_cast<std::size_t>(rows) * cols * n, 0.0);

    const int w = img.width();
    const int h = img.height();
    for (int py = 0; py < rows; ++py) {
        for (int px = 0; px < cols; ++px) {
            double* hist = out.values.data() + (static_cast<std::size_t>(py) * cols + px) * n;
            for (int dy = 0; dy < cfg.patch; ++dy) {
                const int y = y_off + py * cfg.patch + dy;
                for (int dx = 0; dx < cfg.patch; ++dx) {
                    const int x = x_off + px * cfg.patch + dx;
                    const double gx = img.at(std::min(x + 1, w - 1), y) -
                                      img.at(std::max(x - 1, 0), y);
                    const double gy = img.at(x, std::min(y + 1, h - 1)) -
                                      img.at(x, std::max(y - 1, 0));
                    const double m = std::sqrt(gx * gx + gy * gy);
                    if (m == 0.0) continue;
                    double theta = std::atan2(gy, gx);  // unsigned orientation
                    if (theta < 0.0) theta += kPi;
                    if (theta >= kPi) theta -= kPi;
                    const int b1 = std::min(static_cast<int>(theta / bin_width), n - 1);
                    const int b2 = (b1 + 1) % n;  // last and first bins are consecutive
                    const double u = theta / bin_width - b1;  // in [0,1)
                    if (cfg.farther_bin_split) {
                        hist[b1] += m * u;
                        hist[b2] += m * (1.0 - u);
                    } else {
                        hist[b1] += m * (1.0 - u);
                        hist[b2] += m * u;
                    }
                }
            }
            if (cfg.normalize) {
                double norm_sq = 0.0;
                for (int b = 0; b < n; ++b) norm_sq += hist[b] * hist[b];
                if (norm_sq > 0.0) {
                    const double inv = 1.0 / std::sqrt(norm_sq);
                    for (int b = 0; b < n; ++b) hist[b] *= inv;
                }
            }
        }
    }
    return out;
}

AnomalyMap anomaly_map(const Image& img) {
    // channel means on the native 8-bit scale; the edge weights are
    // scale-dependent so this is part of the contract
    double mu[3] = {0.0, 0.0, 0.0};
    for (const Rgb& p : img.data()) {
        mu[0] += p.r;
        mu[1] += p.g;
        mu[2] += p.b;
    }
    const double inv_n = 1.0 / static_cast<double>(img.data().size());
    for (double& m : mu) m *= inv_n;

    const double alpha = (mu[0] + mu[1] + mu[2]) / 3.0;
    double w[3][3] = {};
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            double wab = 1.0;
            if (alpha > 0.0) {
                const double d = (mu[a] - mu[b]) / alpha;
                wab = 1.0 / (1.0 + d * d);
            }
            w[a][b] = w[b][a] = wab;
        }
    }

    double deg[3];
    for (int a = 0; a < 3; ++a) deg[a] = w[a][(a + 1) % 3] + w[a][(a + 2) % 3];

    // L* = D^{-1/2} (D - W) D^{-1/2}
    double lstar[3][3];
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const double l = (a == b) ? deg[a] : -w[a][b];
            lstar[a][b] = l / std::sqrt(deg[a] * deg[b]);
        }
    }

    AnomalyMap out;
    out.width = img.width();
    out.height = img.height();
    out.scores.resize(img.data().size());
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        const Rgb& p = img.data()[i];
        const double s[3] = {static_cast<double>(p.r), static_cast<double>(p.g),
                             static_cast<double>(p.b)};
        double q = 0.0;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) q += s[a] * lstar[a][b] * s[b];
        }
        out.scores[i] = std::max(q, 0.0);  // clamp roundoff; L* is PSD
    }
    return out;
}

AnomalyMap dilate(const AnomalyMap& map, int radius) {
    if (radius < 1) throw std::invalid_argument("dilate: radius must be >= 1");
    AnomalyMap out;
    out.width = map.width;
    out.height = map.height;
    out.scores.resize(map.scores.size());

    // separable max filter: rows then columns
    std::vector<double> tmp(map.scores.size());
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            double m = std::numeric_limits<double>::lowest();
            const int x0 = std::max(x - radius, 0);
            const int x1 = std::min(x + radius, map.width - 1);
            for (int xx = x0; xx <= x1; ++xx) m = std::max(m, map.at(xx, y));
            tmp[static_cast<std::size_t>(y) * map.width + x] = m;
        }
    }
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            double m = std::numeric_limits<double>::lowest();
            const int y0 = std::max(y - radius, 0);
            const int y1 = std::min(y + radius, map.height - 1);
            for (int yy = y0; yy <= y1; ++yy) {
                m = std::max(m, tmp[static_cast<std::size_t>(yy) * map.width + x]);
            }
            out.scores[static_cast<std::size_t>(y) * map.width + x] = m;
        }
    }
    return out;
}

FeatureVector spectral_feature(const Image& img, int side) {
    if (side < kMinImageDim) throw std::invalid_argument("spectral_feature: side must be >= 8");
    const Spectrum spec = dft2(to_gray(img));
    GrayImage logmag(spec.width, spec.height);
    for (std::size_t i = 0; i < spec.magnitudes.size(); ++i) {
        logmag.data()[i] = std::log1p(spec.magnitudes[i]);
    }
    const GrayImage small = resize(logmag, side, side);
    FeatureVector fv;
    fv.values = small.data();
    fv.pipeline_id = "ft+resize" + std::to_string(side);
    return fv;
}

}  // namespace glitchkit
