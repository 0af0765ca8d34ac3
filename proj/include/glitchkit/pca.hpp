#pragma once

#include <cstdint>
#include <vector>

#include "glitchkit/features.hpp"

namespace glitchkit {

/// Truncated PCA basis from the randomized power-iteration SVD.
/// components is k x d row-orthonormal; singular values non-increasing.
struct PcaModel {
    int k = 0;
    std::vector<double> mean;                     // length d
    std::vector<std::vector<double>> components;  // k rows of length d
    std::vector<double> singular_values;          // length k, descending
};

struct PcaConfig {
    int oversample = 10;
    int power_iters = 2;
    std::uint64_t seed = 0;
};

/// Fits a rank-k PCA of the row-sample matrix: center by column means,
/// randomized range finder with (k + oversample) Gaussian probes and
/// re-orthonormalized power iterations, then an exact factorization of
/// the projected small matrix. Deterministic for a fixed seed.
PcaModel pca_fit(const std::vector<FeatureVector>& data, int k, const PcaConfig& cfg = {});

/// Projects (v - mean) onto the component rows; output has length k.
FeatureVector pca_transform(const PcaModel& model, const FeatureVector& v);

}  // namespace glitchkit
