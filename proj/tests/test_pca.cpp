#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "glitchkit/pca.hpp"
#include "glitchkit/rng.hpp"

using namespace glitchkit;

namespace {

// independent oracle: dense exact SVD of the centered data matrix
Eigen::VectorXd exact_singular_values(const std::vector<FeatureVector>& data) {
    const Eigen::Index n = static_cast<Eigen::Index>(data.size());
    const Eigen::Index d = static_cast<Eigen::Index>(data.front().values.size());
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        x.row(i) = Eigen::Map<const Eigen::VectorXd>(data[i].values.data(), d);
    }
    x.rowwise() -= x.colwise().mean();
    return Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues();
}

// exact rank-r data: X = A * B with A (n x r), B (r x d)
std::vector<FeatureVector> low_rank_data(int n, int d, int rank, double noise_sigma,
                                         std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> basis(rank, std::vector<double>(d));
    for (auto& row : basis) {
        for (double& v : row) v = rng.normal();
    }
    std::vector<FeatureVector> data(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> coef(rank);
        for (double& c : coef) c = rng.normal() * 3.0;
        data[i].values.assign(d, 0.0);
        for (int r = 0; r < rank; ++r) {
            for (int j = 0; j < d; ++j) data[i].values[j] += coef[r] * basis[r][j];
        }
        if (noise_sigma > 0.0) {
            for (double& v : data[i].values) v += noise_sigma * rng.normal();
        }
    }
    return data;
}

}  // namespace

TEST_CASE("rank-3 data: randomized svd matches the dense oracle") {
    const auto data = low_rank_data(50, 80, 3, 0.0, 7);
    PcaConfig cfg;
    cfg.power_iters = 2;
    cfg.seed = 11;
    const PcaModel model = pca_fit(data, 3, cfg);
    const Eigen::VectorXd oracle = exact_singular_values(data);
    for (int i = 0; i < 3; ++i) {
        CHECK(model.singular_values[i] ==
              doctest::Approx(oracle(i)).epsilon(1e-6));
    }
    // rank-3 data: the fourth exact singular value is numerically zero
    CHECK(oracle(3) < 1e-8 * oracle(0));
}

TEST_CASE("rank-5 plus noise: top singular values within 1 percent") {
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        const auto data = low_rank_data(60, 90, 5, 0.01, 100 + trial);
        PcaConfig cfg;
        cfg.seed = trial;
        const PcaModel model = pca_fit(data, 5, cfg);
        const Eigen::VectorXd oracle = exact_singular_values(data);
        for (int i = 0; i < 5; ++i) {
            CHECK(std::abs(model.singular_values[i] - oracle(i)) <= 0.01 * oracle(i));
        }
    }
}

TEST_CASE("single nonzero direction is recovered up to sign") {
    std::vector<FeatureVector> data;
    const std::vector<double> dir = {0.6, 0.0, 0.8, 0.0};
    for (double t : {-2.0, -1.0, 1.0, 2.0}) {  // mean zero
        FeatureVector fv;
        for (double v : dir) fv.values.push_back(t * v);
        data.push_back(fv);
    }
    const PcaModel model = pca_fit(data, 1, {});
    double dot = 0.0;
    for (int j = 0; j < 4; ++j) dot += model.components[0][j] * dir[j];
    CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("components are row orthonormal and singular values sorted") {
    const auto data = low_rank_data(40, 30, 8, 0.5, 42);
    const PcaModel model = pca_fit(data, 6, {});
    for (std::size_t a = 0; a < model.components.size(); ++a) {
        for (std::size_t b = a; b < model.components.size(); ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < model.components[a].size(); ++j) {
                dot += model.components[a][j] * model.components[b][j];
            }
            CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-6));
        }
    }
    for (int i = 1; i < model.k; ++i) {
        CHECK(model.singular_values[i] <= model.singular_values[i - 1] + 1e-12);
    }
}

TEST_CASE("pca_fit input validation") {
    CHECK_THROWS(pca_fit({}, 1, {}));
    const auto data = low_rank_data(5, 10, 2, 0.0, 1);
    CHECK_THROWS(pca_fit(data, 6, {}));   // k > #samples
    CHECK_THROWS(pca_fit(data, 11, {}));  // k > d
    CHECK_THROWS(pca_fit({data[0]}, 1, {}));
}

TEST_CASE("transform of the mean is zero and residual is orthogonal") {
    const auto data = low_rank_data(30, 20, 4, 0.1, 9);
    const PcaModel model = pca_fit(data, 4, {});

    FeatureVector mean_vec;
    mean_vec.values = model.mean;
    for (double v : pca_transform(model, mean_vec).values) {
        CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
    }

    // residual after reconstruction is orthogonal to every component
    const FeatureVector& sample = data[3];
    const FeatureVector proj = pca_transform(model, sample);
    std::vector<double> recon = model.mean;
    for (int r = 0; r < model.k; ++r) {
        for (std::size_t j = 0; j < recon.size(); ++j) {
            recon[j] += proj.values[r] * model.components[r][j];
        }
    }
    for (int r = 0; r < model.k; ++r) {
        double dot = 0.0;
        for (std::size_t j = 0; j < recon.size(); ++j) {
            dot += (sample.values[j] - recon[j]) * model.components[r][j];
        }
        CHECK(dot == doctest::Approx(0.0).epsilon(1e-6));
    }

    FeatureVector bad;
    bad.values.assign(7, 0.0);
    CHECK_THROWS(pca_transform(model, bad));
}

TEST_CASE("projected training data variance matches singular values") {
    const auto data = low_rank_data(50, 40, 3, 0.0, 66);
    const PcaModel model = pca_fit(data, 3, {});
    const int n = static_cast<int>(data.size());
    for (int r = 0; r < 3; ++r) {
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& fv : data) {
            const double p = pca_transform(model, fv).values[r];
            sum += p;
            sum_sq += p * p;
        }
        const double var = (sum_sq - sum * sum / n) / (n - 1);
        const double expected = model.singular_values[r] * model.singular_values[r] / (n - 1);
        CHECK(var == doctest::Approx(expected).epsilon(0.05));
    }
}

TEST_CASE("pca_fit is deterministic for a fixed seed") {
    const auto data = low_rank_data(30, 25, 4, 0.2, 5);
    PcaConfig cfg;
    cfg.seed = 99;
    const PcaModel a = pca_fit(data, 4, cfg);
    const PcaModel b = pca_fit(data, 4, cfg);
    CHECK(a.singular_values == b.singular_values);
    CHECK(a.components == b.components);
}
