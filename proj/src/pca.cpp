#include "glitchkit/pca.hpp"

#include <Eigen/Dense>

#include <stdexcept>

#include "glitchkit/rng.hpp"

namespace glitchkit {

namespace {

Eigen::MatrixXd gaussian_probes(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd omega(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) omega(i, j) = rng.normal();
    }
    return omega;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

}  // namespace

PcaModel pca_fit(const std::vector<FeatureVector>& data, int k, const PcaConfig& cfg) {
    if (data.empty()) throw std::invalid_argument("pca_fit: empty data");
    const Eigen::Index n = static_cast<Eigen::Index>(data.size());
    const Eigen::Index d = static_cast<Eigen::Index>(data.front().values.size());
    if (n < 2) throw std::invalid_argument("pca_fit: needs at least 2 samples");
    if (k < 1 || k > std::min(n, d)) {
        throw std::invalid_argument("pca_fit: k exceeds the data rank bound");
    }

    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(data[i].values.size()) != d) {
            throw std::invalid_argument("pca_fit: inconsistent feature lengths");
        }
        x.row(i) = Eigen::Map<const Eigen::VectorXd>(data[i].values.data(), d);
    }

    const Eigen::VectorXd mean = x.colwise().mean();
    x.rowwise() -= mean.transpose();

    const Eigen::Index l = std::min<Eigen::Index>(k + cfg.oversample, std::min(n, d));

    // range finder: Y = X Omega, then power iterations with
    // re-orthonormalization after every product for stability
    Rng rng(cfg.seed);
    Eigen::MatrixXd q = orthonormalize(x * gaussian_probes(rng, d, l));
    for (int it = 0; it < cfg.power_iters; ++it) {
        q = orthonormalize(x.transpose() * q);
        q = orthonormalize(x * q);
    }

    // exact SVD of the projected (l x d) matrix; right singular vectors of
    // B are those of X restricted to the captured range
    const Eigen::MatrixXd b = q.transpose() * x;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);

    PcaModel model;
    model.k = k;
    model.mean.assign(mean.data(), mean.data() + d);
    model.components.resize(k);
    model.singular_values.resize(k);
    for (int i = 0; i < k; ++i) {
        model.singular_values[i] = svd.singularValues()(i);
        const Eigen::VectorXd comp = svd.matrixV().col(i);
        model.components[i].assign(comp.data(), comp.data() + d);
    }
    return model;
}

FeatureVector pca_transform(const PcaModel& model, const FeatureVector& v) {
    const std::size_t d = model.mean.size();
    if (v.values.size() != d) {
        throw std::invalid_argument("pca_transform: feature length mismatch");
    }
    FeatureVector out;
    out.values.resize(model.components.size());
    for (std::size_t i = 0; i < model.components.size(); ++i) {
        double acc = 0.0;
        const auto& comp = model.components[i];
        for (std::size_t j = 0; j < d; ++j) acc += (v.values[j] - model.mean[j]) * comp[j];
        out.values[i] = acc;
    }
    out.pipeline_id = v.pipeline_id.empty() ? "pca" : v.pipeline_id + "+pca";
    return out;
}

}  // namespace glitchkit
