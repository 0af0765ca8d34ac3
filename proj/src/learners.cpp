#include "glitchkit/learners.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace glitchkit {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(-t)), overflow-safe
double softplus_neg(double t) {
    if (t > 0.0) return std::log1p(std::exp(-t));
    return -t + std::log1p(std::exp(t));
}

void check_training_input(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                          int min_per_class) {
    if (x.empty() || x.size() != y.size()) {
        throw std::invalid_argument("training input: empty or mismatched X/y");
    }
    const std::size_t d = x.front().values.size();
    int n_pos = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].values.size() != d) {
            throw std::invalid_argument("training input: inconsistent feature lengths");
        }
        for (double v : x[i].values) {
            if (!std::isfinite(v)) throw std::invalid_argument("training input: non-finite feature");
        }
        if (y[i] != 0 && y[i] != 1) throw std::invalid_argument("training input: labels must be 0/1");
        n_pos += y[i];
    }
    const int n_neg = static_cast<int>(y.size()) - n_pos;
    if (n_pos < min_per_class || n_neg < min_per_class) {
        throw std::invalid_argument("training input: needs both classes represented");
    }
}

Standardizer fit_standardizer(const std::vector<FeatureVector>& x) {
    const std::size_t n = x.size();
    const std::size_t d = x.front().values.size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 1.0);
    for (const auto& row : x) {
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += row.values[j];
    }
    for (std::size_t j = 0; j < d; ++j) s.mean[j] /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (const auto& row : x) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = row.values[j] - s.mean[j];
            var[j] += dev * dev;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        s.stddev[j] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

std::vector<std::vector<double>> standardize_all(const Standardizer& s,
                                                 const std::vector<FeatureVector>& x) {
    std::vector<std::vector<double>> z;
    z.reserve(x.size());
    for (const auto& row : x) z.push_back(s.apply(row.values));
    return z;
}

TrainMeta make_meta(const std::vector<int>& y) {
    TrainMeta meta;
    meta.n_samples = static_cast<int>(y.size());
    meta.n_positive = std::accumulate(y.begin(), y.end(), 0);
    return meta;
}

}  // namespace

std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::LR: return "lr";
        case LearnerKind::LDA: return "lda";
        case LearnerKind::SVC: return "svc";
        case LearnerKind::Threshold: return "threshold";
    }
    throw std::logic_error("unknown learner kind");
}

LearnerKind learner_kind_from_string(const std::string& name) {
    if (name == "lr") return LearnerKind::LR;
    if (name == "lda") return LearnerKind::LDA;
    if (name == "svc") return LearnerKind::SVC;
    if (name == "threshold") return LearnerKind::Threshold;
    throw std::invalid_argument("unknown learner kind: " + name);
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    if (x.size() != mean.size()) {
        throw std::invalid_argument("standardizer: feature length mismatch");
    }
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean[j]) / stddev[j];
    return z;
}

// ---------------------------------------------------------------------------
// Logistic regression: L-BFGS with Armijo backtracking on the full batch.
// ---------------------------------------------------------------------------

double lr_loss_grad(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    std::span<const double> w, double b, double c, std::vector<double>* grad) {
    const std::size_t n = x.size();
    const std::size_t d = w.size();
    double loss = 0.0;
    if (grad) grad->assign(d + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double m = b;
        for (std::size_t j = 0; j < d; ++j) m += w[j] * x[i][j];
        const double ysign = y[i] == 1 ? 1.0 : -1.0;
        loss += softplus_neg(ysign * m);
        if (grad) {
            const double r = sigmoid(m) - static_cast<double>(y[i]);
            for (std::size_t j = 0; j < d; ++j) (*grad)[j] += r * x[i][j];
            (*grad)[d] += r;
        }
    }
    const double inv2c = 1.0 / (2.0 * c);
    for (std::size_t j = 0; j < d; ++j) {
        loss += inv2c * w[j] * w[j];
        if (grad) (*grad)[j] += w[j] / c;
    }
    return loss;
}

TrainedModel lr_train(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                      const LrConfig& cfg, LrDiagnostics* diag) {
    check_training_input(x, y, 1);
    if (cfg.c <= 0.0) throw std::invalid_argument("lr_train: c must be positive");

    const Standardizer std_ = fit_standardizer(x);
    const auto z = standardize_all(std_, x);
    const std::size_t d = z.front().size();

    std::vector<double> theta(d + 1, 0.0);  // [w..., b]
    auto eval = [&](const std::vector<double>& t, std::vector<double>* g) {
        return lr_loss_grad(z, y, std::span<const double>(t.data(), d), t[d], cfg.c, g);
    };

    // L-BFGS two-loop recursion, memory 10
    constexpr int kMem = 10;
    std::vector<std::vector<double>> s_hist, y_hist;
    std::vector<double> rho_hist;

    std::vector<double> grad;
    double loss = eval(theta, &grad);
    if (diag) diag->loss_history.push_back(loss);

    int iter = 0;
    double grad_norm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
    for (; iter < cfg.max_iter && grad_norm > cfg.tol; ++iter) {
        // direction = -H grad
        std::vector<double> q = grad;
        const int m = static_cast<int>(s_hist.size());
        std::vector<double> alpha(m);
        for (int i = m - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] *
                       std::inner_product(s_hist[i].begin(), s_hist[i].end(), q.begin(), 0.0);
            for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[i] * y_hist[i][j];
        }
        if (m > 0) {
            const auto& sl = s_hist.back();
            const auto& yl = y_hist.back();
            const double sy = std::inner_product(sl.begin(), sl.end(), yl.begin(), 0.0);
            const double yy = std::inner_product(yl.begin(), yl.end(), yl.begin(), 0.0);
            if (yy > 0.0) {
                const double scale = sy / yy;
                for (double& v : q) v *= scale;
            }
        }
        for (int i = 0; i < m; ++i) {
            const double beta = rho_hist[i] *
                                std::inner_product(y_hist[i].begin(), y_hist[i].end(), q.begin(), 0.0);
            for (std::size_t j = 0; j < q.size(); ++j) q[j] += (alpha[i] - beta) * s_hist[i][j];
        }
        for (double& v : q) v = -v;

        double dir_dot_grad =
            std::inner_product(q.begin(), q.end(), grad.begin(), 0.0);
        if (dir_dot_grad >= 0.0) {  // not a descent direction; fall back to steepest descent
            for (std::size_t j = 0; j < q.size(); ++j) q[j] = -grad[j];
            dir_dot_grad = -grad_norm * grad_norm;
        }

        // Armijo backtracking by step halving keeps the loss monotone
        double step = 1.0;
        std::vector<double> next(theta.size());
        double next_loss = loss;
        bool moved = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t j = 0; j < theta.size(); ++j) next[j] = theta[j] + step * q[j];
            next_loss = eval(next, nullptr);
            if (next_loss <= loss + 1e-4 * step * dir_dot_grad) {
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;

        std::vector<double> next_grad;
        const double recomputed = eval(next, &next_grad);
        (void)recomputed;

        std::vector<double> s_vec(theta.size()), y_vec(theta.size());
        for (std::size_t j = 0; j < theta.size(); ++j) {
            s_vec[j] = next[j] - theta[j];
            y_vec[j] = next_grad[j] - grad[j];
        }
        const double sy = std::inner_product(s_vec.begin(), s_vec.end(), y_vec.begin(), 0.0);
        if (sy > 1e-12) {
            if (static_cast<int>(s_hist.size()) == kMem) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
        }

        theta = std::move(next);
        grad = std::move(next_grad);
        loss = next_loss;
        grad_norm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
        if (diag) diag->loss_history.push_back(loss);
    }

    if (diag) {
        diag->final_grad_norm = grad_norm;
        diag->iterations = iter;
    }

    TrainedModel model;
    model.kind = LearnerKind::LR;
    model.standardizer = std_;
    LrWeights weights;
    weights.w.assign(theta.begin(), theta.begin() + d);
    weights.b = theta[d];
    model.weights = std::move(weights);
    model.train_meta = make_meta(y);
    return model;
}

// ---------------------------------------------------------------------------
// LDA
// ---------------------------------------------------------------------------

TrainedModel lda_train(const std::vector<FeatureVector>& x, const std::vector<int>& y) {
    check_training_input(x, y, 2);

    const Standardizer std_ = fit_standardizer(x);
    const auto z = standardize_all(std_, x);
    const Eigen::Index n = static_cast<Eigen::Index>(z.size());
    const Eigen::Index d = static_cast<Eigen::Index>(z.front().size());

    Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(d);
    Eigen::Index n0 = 0, n1 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Map<const Eigen::VectorXd> row(z[i].data(), d);
        if (y[i] == 1) {
            mu1 += row;
            ++n1;
        } else {
            mu0 += row;
            ++n0;
        }
    }
    mu0 /= static_cast<double>(n0);
    mu1 /= static_cast<double>(n1);

    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Map<const Eigen::VectorXd> row(z[i].data(), d);
        const Eigen::VectorXd dev = row - (y[i] == 1 ? mu1 : mu0);
        pooled.noalias() += dev * dev.transpose();
    }
    pooled /= static_cast<double>(n - 2);
    const double eps = std::max(1e-6 * pooled.trace() / static_cast<double>(d), 1e-12);
    pooled.diagonal().array() += eps;

    const Eigen::VectorXd w = pooled.llt().solve(mu1 - mu0);
    const double prior0 = static_cast<double>(n0) / static_cast<double>(n);
    const double prior1 = static_cast<double>(n1) / static_cast<double>(n);
    const double threshold = 0.5 * w.dot(mu0 + mu1) - std::log(prior1 / prior0);

    TrainedModel model;
    model.kind = LearnerKind::LDA;
    model.standardizer = std_;
    LdaWeights weights;
    weights.w.assign(w.data(), w.data() + d);
    weights.threshold = threshold;
    weights.prior0 = prior0;
    weights.prior1 = prior1;
    model.weights = std::move(weights);
    model.train_meta = make_meta(y);
    return model;
}

// ---------------------------------------------------------------------------
// SVC via SMO on the dual, maximal-violating-pair working set.
// ---------------------------------------------------------------------------

namespace {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double dist_sq = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        dist_sq += diff * diff;
    }
    return std::exp(-gamma * dist_sq);
}

// Platt-style calibration: fit sigmoid(a*f + b) to binary labels by Newton
// steps with halving. Deterministic; stays finite on separable data via
// the iteration cap.
void fit_platt(const std::vector<double>& f, const std::vector<int>& y, double& a, double& b) {
    a = 1.0;
    b = 0.0;
    const std::size_t n = f.size();
    auto nll = [&](double aa, double bb) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = aa * f[i] + bb;
            const double ysign = y[i] == 1 ? 1.0 : -1.0;
            s += softplus_neg(ysign * t);
        }
        return s;
    };
    double cur = nll(a, b);
    for (int iter = 0; iter < 100; ++iter) {
        double g_a = 0.0, g_b = 0.0, h_aa = 0.0, h_ab = 0.0, h_bb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(a * f[i] + b);
            const double r = p - static_cast<double>(y[i]);
            const double wgt = std::max(p * (1.0 - p), 1e-12);
            g_a += r * f[i];
            g_b += r;
            h_aa += wgt * f[i] * f[i];
            h_ab += wgt * f[i];
            h_bb += wgt;
        }
        if (std::abs(g_a) + std::abs(g_b) < 1e-10) break;
        const double det = h_aa * h_bb - h_ab * h_ab;
        double da, db;
        if (std::abs(det) > 1e-12) {
            da = -(h_bb * g_a - h_ab * g_b) / det;
            db = -(-h_ab * g_a + h_aa * g_b) / det;
        } else {
            da = -g_a;
            db = -g_b;
        }
        double step = 1.0;
        bool moved = false;
        for (int halvings = 0; halvings < 40; ++halvings) {
            const double cand = nll(a + step * da, b + step * db);
            if (cand < cur) {
                a += step * da;
                b += step * db;
                cur = cand;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
}

}  // namespace

TrainedModel svc_train(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                       const SvcConfig& cfg, SvcDiagnostics* diag) {
    check_training_input(x, y, 1);
    if (cfg.c <= 0.0) throw std::invalid_argument("svc_train: c must be positive");

    const Standardizer std_ = fit_standardizer(x);
    const auto z = standardize_all(std_, x);
    const std::size_t n = z.size();
    const std::size_t d = z.front().size();

    double gamma;
    if (cfg.gamma) {
        gamma = *cfg.gamma;
        if (gamma <= 0.0) throw std::invalid_argument("svc_train: gamma must be positive");
    } else {
        // "scale": 1 / (d * Var(X)) with Var the pooled elementwise variance
        double mean_all = 0.0, var_all = 0.0;
        for (const auto& row : z)
            for (double v : row) mean_all += v;
        mean_all /= static_cast<double>(n * d);
        for (const auto& row : z)
            for (double v : row) var_all += (v - mean_all) * (v - mean_all);
        var_all /= static_cast<double>(n * d);
        gamma = var_all > 1e-12 ? 1.0 / (static_cast<double>(d) * var_all) : 1.0;
    }

    std::vector<double> ysign(n);
    for (std::size_t i = 0; i < n; ++i) ysign[i] = y[i] == 1 ? 1.0 : -1.0;

    // full kernel matrix; the pipeline caps SVC training sets so it fits
    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        kernel[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = rbf_kernel(z[i], z[j], gamma);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }

    // dual in min form: 1/2 a^T Q a - e^T a, Q_ij = y_i y_j K_ij
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // G = Q a - e
    const double c_box = cfg.c;
    constexpr double kTau = 1e-12;

    auto dual_objective = [&]() {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) obj += alpha[i] * (grad[i] - 1.0);
        return -0.5 * obj;  // maximized dual
    };

    int updates = 0;
    double violation = std::numeric_limits<double>::infinity();
    const int sweep = static_cast<int>(n);
    if (diag) diag->dual_history.push_back(dual_objective());
    while (updates < cfg.max_iter) {
        // maximal violating pair
        double up_max = -std::numeric_limits<double>::infinity();
        double low_min = std::numeric_limits<double>::infinity();
        std::ptrdiff_t i_up = -1, j_low = -1;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -ysign[t] * grad[t];
            const bool in_up = (ysign[t] > 0 && alpha[t] < c_box) || (ysign[t] < 0 && alpha[t] > 0);
            const bool in_low = (ysign[t] > 0 && alpha[t] > 0) || (ysign[t] < 0 && alpha[t] < c_box);
            if (in_up && v > up_max) {
                up_max = v;
                i_up = static_cast<std::ptrdiff_t>(t);
            }
            if (in_low && v < low_min) {
                low_min = v;
                j_low = static_cast<std::ptrdiff_t>(t);
            }
        }
        violation = up_max - low_min;
        if (i_up < 0 || j_low < 0 || violation < cfg.tol) break;

        const auto i = static_cast<std::size_t>(i_up);
        const auto j = static_cast<std::size_t>(j_low);
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];

        // both label cases reduce to K_ii + K_jj - 2K_ij once labels fold
        // out of the Q matrix
        if (ysign[i] != ysign[j]) {
            double quad = kernel[i * n + i] + kernel[j * n + j] - 2.0 * kernel[i * n + j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else {
                if (alpha[i] < 0.0) {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
            }
            if (diff > 0.0) {
                if (alpha[i] > c_box) {
                    alpha[i] = c_box;
                    alpha[j] = c_box - diff;
                }
            } else {
                if (alpha[j] > c_box) {
                    alpha[j] = c_box;
                    alpha[i] = c_box + diff;
                }
            }
        } else {
            double quad = kernel[i * n + i] + kernel[j * n + j] - 2.0 * kernel[i * n + j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c_box) {
                if (alpha[i] > c_box) {
                    alpha[i] = c_box;
                    alpha[j] = sum - c_box;
                }
            } else {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
            }
            if (sum > c_box) {
                if (alpha[j] > c_box) {
                    alpha[j] = c_box;
                    alpha[i] = sum - c_box;
                }
            } else {
                if (alpha[i] < 0.0) {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }

        const double dai = ysign[i] * (alpha[i] - old_ai);
        const double daj = ysign[j] * (alpha[j] - old_aj);
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += ysign[t] * (kernel[t * n + i] * dai + kernel[t * n + j] * daj);
        }

        ++updates;
        if (diag && updates % sweep == 0) diag->dual_history.push_back(dual_objective());
    }
    if (diag) {
        diag->dual_history.push_back(dual_objective());
        diag->alpha = alpha;
        diag->final_violation = violation;
        diag->pair_updates = updates;
    }

    // bias from free support vectors, else midpoint of the violation bounds
    double bias;
    {
        double free_sum = 0.0;
        int free_count = 0;
        for (std::size_t t = 0; t < n; ++t) {
            if (alpha[t] > kTau && alpha[t] < c_box - kTau) {
                free_sum += -ysign[t] * grad[t];
                ++free_count;
            }
        }
        if (free_count > 0) {
            bias = free_sum / free_count;
        } else {
            double up_max = -std::numeric_limits<double>::infinity();
            double low_min = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < n; ++t) {
                const double v = -ysign[t] * grad[t];
                const bool in_up = (ysign[t] > 0 && alpha[t] < c_box) || (ysign[t] < 0 && alpha[t] > 0);
                const bool in_low = (ysign[t] > 0 && alpha[t] > 0) || (ysign[t] < 0 && alpha[t] < c_box);
                if (in_up) up_max = std::max(up_max, v);
                if (in_low) low_min = std::min(low_min, v);
            }
            bias = (up_max + low_min) / 2.0;
        }
    }

    SvcWeights weights;
    weights.gamma = gamma;
    weights.bias = bias;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > kTau) {
            weights.support_vectors.push_back(z[t]);
            weights.dual_coef.push_back(alpha[t] * ysign[t]);
        }
    }

    // decision values on the training set feed the probability link
    std::vector<double> decisions(n);
    for (std::size_t t = 0; t < n; ++t) {
        double f = bias;
        for (std::size_t s = 0; s < weights.support_vectors.size(); ++s) {
            f += weights.dual_coef[s] * rbf_kernel(weights.support_vectors[s], z[t], gamma);
        }
        decisions[t] = f;
    }
    fit_platt(decisions, y, weights.platt_a, weights.platt_b);

    TrainedModel model;
    model.kind = LearnerKind::SVC;
    model.standardizer = std_;
    model.weights = std::move(weights);
    model.train_meta = make_meta(y);
    return model;
}

double svc_decision(const TrainedModel& model, const FeatureVector& v) {
    const auto& weights = std::get<SvcWeights>(model.weights);
    const std::vector<double> z = model.standardizer.apply(v.values);
    double f = weights.bias;
    for (std::size_t s = 0; s < weights.support_vectors.size(); ++s) {
        f += weights.dual_coef[s] * rbf_kernel(weights.support_vectors[s], z, weights.gamma);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Threshold rule
// ---------------------------------------------------------------------------

TrainedModel threshold_train(const std::vector<double>& scores, const std::vector<int>& y) {
    if (scores.empty() || scores.size() != y.size()) {
        throw std::invalid_argument("threshold_train: empty or mismatched input");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) throw std::invalid_argument("threshold_train: non-finite score");
    }

    std::vector<double> uniq(scores);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    // candidate cuts: midpoints between neighbors plus sentinels beyond the
    // data (margin 0) so degenerate inputs can still pick a majority rule
    struct Candidate {
        double cut;
        double margin;
    };
    std::vector<Candidate> cuts;
    cuts.push_back({uniq.front() - 1.0, 0.0});
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
        cuts.push_back({(uniq[i] + uniq[i + 1]) / 2.0, uniq[i + 1] - uniq[i]});
    }
    cuts.push_back({uniq.back() + 1.0, 0.0});

    const int n = static_cast<int>(scores.size());
    int best_correct = -1;
    double best_margin = -1.0;
    double best_cut = 0.0;
    bool best_above = true;
    for (const Candidate& cand : cuts) {
        for (const bool above : {true, false}) {
            int correct = 0;
            for (int i = 0; i < n; ++i) {
                const bool positive = above ? scores[i] >= cand.cut : scores[i] <= cand.cut;
                if (static_cast<int>(positive) == y[i]) ++correct;
            }
            const bool better =
                correct > best_correct ||
                (correct == best_correct &&
                 (cand.margin > best_margin ||
                  (cand.margin == best_margin &&
                   (cand.cut < best_cut || (cand.cut == best_cut && above && !best_above)))));
            if (better) {
                best_correct = correct;
                best_margin = cand.margin;
                best_cut = cand.cut;
                best_above = above;
            }
        }
    }

    TrainedModel model;
    model.kind = LearnerKind::Threshold;
    ThresholdWeights weights;
    weights.cut = best_cut;
    weights.positive_above = best_above;
    model.weights = weights;
    model.train_meta = make_meta(y);
    return model;
}

// ---------------------------------------------------------------------------

double predict_proba(const TrainedModel& model, const FeatureVector& v) {
    switch (model.kind) {
        case LearnerKind::LR: {
            const auto& weights = std::get<LrWeights>(model.weights);
            const std::vector<double> z = model.standardizer.apply(v.values);
            if (z.size() != weights.w.size()) {
                throw std::invalid_argument("predict_proba: dimension mismatch");
            }
            double m = weights.b;
            for (std::size_t j = 0; j < z.size(); ++j) m += weights.w[j] * z[j];
            return sigmoid(m);
        }
        case LearnerKind::LDA: {
            const auto& weights = std::get<LdaWeights>(model.weights);
            const std::vector<double> z = model.standardizer.apply(v.values);
            if (z.size() != weights.w.size()) {
                throw std::invalid_argument("predict_proba: dimension mismatch");
            }
            double m = -weights.threshold;
            for (std::size_t j = 0; j < z.size(); ++j) m += weights.w[j] * z[j];
            return sigmoid(m);
        }
        case LearnerKind::SVC: {
            const auto& weights = std::get<SvcWeights>(model.weights);
            const double f = svc_decision(model, v);
            return sigmoid(weights.platt_a * f + weights.platt_b);
        }
        case LearnerKind::Threshold: {
            const auto& weights = std::get<ThresholdWeights>(model.weights);
            if (v.values.size() != 1) {
                throw std::invalid_argument("predict_proba: threshold model expects a scalar");
            }
            const double s = v.values.front();
            const bool positive = weights.positive_above ? s >= weights.cut : s <= weights.cut;
            return positive ? 1.0 : 0.0;
        }
    }
    throw std::logic_error("unknown learner kind");
}

bool predict(const TrainedModel& model, const FeatureVector& v) {
    return predict_proba(model, v) >= 0.5;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::json model_to_json(const TrainedModel& model) {
    nlohmann::json j;
    j["kind"] = to_string(model.kind);
    j["pipeline_id"] = model.pipeline_id;
    j["train_meta"] = {{"n_samples", model.train_meta.n_samples},
                       {"n_positive", model.train_meta.n_positive},
                       {"seed", model.train_meta.seed}};
    if (model.kind != LearnerKind::Threshold) {
        j["standardizer"] = {{"mean", model.standardizer.mean},
                             {"stddev", model.standardizer.stddev}};
    }
    switch (model.kind) {
        case LearnerKind::LR: {
            const auto& weights = std::get<LrWeights>(model.weights);
            j["weights"] = {{"w", weights.w}, {"b", weights.b}};
            break;
        }
        case LearnerKind::LDA: {
            const auto& weights = std::get<LdaWeights>(model.weights);
            j["weights"] = {{"w", weights.w},
                            {"threshold", weights.threshold},
                            {"prior0", weights.prior0},
                            {"prior1", weights.prior1}};
            break;
        }
        case LearnerKind::SVC: {
            const auto& weights = std::get<SvcWeights>(model.weights);
            j["weights"] = {{"support_vectors", weights.support_vectors},
                            {"dual_coef", weights.dual_coef},
                            {"bias", weights.bias},
                            {"gamma", weights.gamma},
                            {"platt_a", weights.platt_a},
                            {"platt_b", weights.platt_b}};
            break;
        }
        case LearnerKind::Threshold: {
            const auto& weights = std::get<ThresholdWeights>(model.weights);
            j["weights"] = {{"cut", weights.cut}, {"positive_above", weights.positive_above}};
            break;
        }
    }
    return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
    TrainedModel model;
    model.kind = learner_kind_from_string(j.at("kind").get<std::string>());
    model.pipeline_id = j.at("pipeline_id").get<std::string>();
    const auto& meta = j.at("train_meta");
    model.train_meta.n_samples = meta.at("n_samples").get<int>();
    model.train_meta.n_positive = meta.at("n_positive").get<int>();
    model.train_meta.seed = meta.at("seed").get<std::uint64_t>();
    if (model.kind != LearnerKind::Threshold) {
        const auto& s = j.at("standardizer");
        model.standardizer.mean = s.at("mean").get<std::vector<double>>();
        model.standardizer.stddev = s.at("stddev").get<std::vector<double>>();
    }
    const auto& w = j.at("weights");
    switch (model.kind) {
        case LearnerKind::LR: {
            LrWeights weights;
            weights.w = w.at("w").get<std::vector<double>>();
            weights.b = w.at("b").get<double>();
            model.weights = std::move(weights);
            break;
        }
        case LearnerKind::LDA: {
            LdaWeights weights;
            weights.w = w.at("w").get<std::vector<double>>();
            weights.threshold = w.at("threshold").get<double>();
            weights.prior0 = w.at("prior0").get<double>();
            weights.prior1 = w.at("prior1").get<double>();
            model.weights = std::move(weights);
            break;
        }
        case LearnerKind::SVC: {
            SvcWeights weights;
            weights.support_vectors =
                w.at("support_vectors").get<std::vector<std::vector<double>>>();
            weights.dual_coef = w.at("dual_coef").get<std::vector<double>>();
            weights.bias = w.at("bias").get<double>();
            weights.gamma = w.at("gamma").get<double>();
            weights.platt_a = w.at("platt_a").get<double>();
            weights.platt_b = w.at("platt_b").get<double>();
            model.weights = std::move(weights);
            break;
        }
        case LearnerKind::Threshold: {
            ThresholdWeights weights;
            weights.cut = w.at("cut").get<double>();
            weights.positive_above = w.at("positive_above").get<bool>();
            model.weights = weights;
            break;
        }
    }
    return model;
}

}  // namespace glitchkit
