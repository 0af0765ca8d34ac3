#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "glitchkit/features.hpp"

namespace glitchkit {

enum class LearnerKind { LR, LDA, SVC, Threshold };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

/// Per-column standardization fitted on the training set (mean 0, var 1;
/// constant columns pass through unscaled).
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    std::vector<double> apply(std::span<const double> x) const;
};

struct LrWeights {
    std::vector<double> w;  // in standardized space
    double b = 0.0;
};

struct LdaWeights {
    std::vector<double> w;     // Fisher direction, standardized space
    double threshold = 0.0;    // midpoint adjusted by the log-prior ratio
    double prior0 = 0.5;
    double prior1 = 0.5;
};

struct SvcWeights {
    std::vector<std::vector<double>> support_vectors;  // standardized space
    std::vector<double> dual_coef;                     // alpha_i * y_i
    double bias = 0.0;
    double gamma = 1.0;
    double platt_a = 1.0;  // probability = sigmoid(a * decision + b)
    double platt_b = 0.0;
};

struct ThresholdWeights {
    double cut = 0.0;
    bool positive_above = true;  // predict 1 iff score >= cut (else score <= cut)
};

struct TrainMeta {
    int n_samples = 0;
    int n_positive = 0;
    std::uint64_t seed = 0;
};

struct TrainedModel {
    LearnerKind kind = LearnerKind::LR;
    std::string pipeline_id;
    Standardizer standardizer;  // unused by Threshold
    std::variant<LrWeights, LdaWeights, SvcWeights, ThresholdWeights> weights;
    TrainMeta train_meta;
};

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

struct LrConfig {
    double c = 1.0;  // L2 strength: objective = sum log-loss + (1/2c)||w||^2
    double tol = 1e-6;
    int max_iter = 500;
};

struct LrDiagnostics {
    std::vector<double> loss_history;
    double final_grad_norm = 0.0;
    int iterations = 0;
};

/// Full-batch penalized log-loss and its gradient at (w, b). Rows of x are
/// samples (already standardized); grad has layout [dw..., db].
double lr_loss_grad(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    std::span<const double> w, double b, double c, std::vector<double>* grad);

TrainedModel lr_train(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                      const LrConfig& cfg = {}, LrDiagnostics* diag = nullptr);

// ---------------------------------------------------------------------------
// Linear discriminant analysis
// ---------------------------------------------------------------------------

TrainedModel lda_train(const std::vector<FeatureVector>& x, const std::vector<int>& y);

// ---------------------------------------------------------------------------
// RBF support vector classifier (SMO dual solver)
// ---------------------------------------------------------------------------

struct SvcConfig {
    double c = 1.0;
    std::optional<double> gamma;  // nullopt = "scale": 1 / (d * Var(X))
    double tol = 1e-3;            // KKT violation stopping bound
    int max_iter = 200000;        // pair updates
};

struct SvcDiagnostics {
    std::vector<double> dual_history;  // maximized dual objective per sweep
    std::vector<double> alpha;         // per-sample duals at convergence
    double final_violation = 0.0;
    int pair_updates = 0;
};

TrainedModel svc_train(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                       const SvcConfig& cfg = {}, SvcDiagnostics* diag = nullptr);

/// Uncalibrated decision value sum(alpha_i y_i k(sv_i, z)) + bias.
double svc_decision(const TrainedModel& model, const FeatureVector& v);

// ---------------------------------------------------------------------------
// Scalar threshold rule
// ---------------------------------------------------------------------------

/// Picks the accuracy-maximizing cut among midpoints of consecutive sorted
/// unique scores (plus sentinels beyond both ends) and a polarity. Ties go
/// to the larger margin, then the smaller cut, then the ">=" polarity.
TrainedModel threshold_train(const std::vector<double>& scores, const std::vector<int>& y);

// ---------------------------------------------------------------------------

/// Probability of the positive class in [0,1]; Threshold models emit {0,1}.
double predict_proba(const TrainedModel& model, const FeatureVector& v);

/// predict_proba >= 0.5
bool predict(const TrainedModel& model, const FeatureVector& v);

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace glitchkit
