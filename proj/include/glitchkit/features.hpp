#pragma once

#include <string>
#include <vector>

#include "glitchkit/fft.hpp"
#include "glitchkit/image.hpp"

namespace glitchkit {

/// Flat real-valued feature list plus a descriptor of the producing chain.
struct FeatureVector {
    std::vector<double> values;
    std::string pipeline_id;
};

struct HogConfig {
    int patch = 16;
    int bins = 9;
    /// When set, votes follow the swapped split (the farther bin receives
    /// the larger share). Default is standard linear interpolation.
    bool farther_bin_split = false;
    /// Per-patch L2 normalization; disable to inspect raw vote histograms.
    bool normalize = true;
};

struct HogDescriptor {
    int patch_rows = 0;
    int patch_cols = 0;
    int bins_per_patch = 0;
    std::vector<double> values;  // patch_rows * patch_cols * bins, L2-normalized per patch
};

/// Histogram of oriented gradients over square patches. Gradients are
/// central differences with clamped borders; unsigned orientations in
/// [0, pi) vote into the two bracketing bins (cyclic), and each patch
/// histogram is L2-normalized (all-zero patches stay zero). The raster is
/// center-cropped so the patch size divides both dims.
HogDescriptor hog(const GrayImage& img, const HogConfig& cfg = {});

/// Per-pixel anomaly scores, all >= 0.
struct AnomalyMap {
    int width = 0;
    int height = 0;
    std::vector<double> scores;

    double at(int x, int y) const { return scores[static_cast<std::size_t>(y) * width + x]; }
};

/// Channel-graph anomaly measure. Builds the 3-vertex graph over (r,g,b)
/// with Cauchy edge weights from the channel means, normalizes its
/// Laplacian, and scores each pixel by the quadratic form of its color.
/// All-black images define alpha = 0; weights fall back to 1 and the map
/// is identically zero.
AnomalyMap anomaly_map(const Image& img);

/// Grayscale morphological dilation: max over the (2r+1)^2 neighborhood,
/// edge-clamped.
AnomalyMap dilate(const AnomalyMap& map, int radius);

/// Log-magnitude spectrum feature: gray -> unitary DFT -> log(1+|F|),
/// DC-centered -> bilinear resize to side x side -> row-major flatten.
FeatureVector spectral_feature(const Image& img, int side);

}  // namespace glitchkit
