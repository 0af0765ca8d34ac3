#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "glitchkit/glitch.hpp"
#include "glitchkit/learners.hpp"
#include "glitchkit/pca.hpp"

namespace glitchkit {

/// Specialist grouping: one detector per corruption class. The two dotted
/// generation modes train a single "dotted lines" detector. Order matches
/// the model table and fixes the ensemble input layout.
enum class ArtifactGroup {
    Shapes,
    LinePixelation,
    Shader,
    MorseCode,
    ParallelLines,
    DottedLines,
    Stuttering,
    Triangulation,
    Discoloration,
    Tearing,
};

inline constexpr int kNumGroups = 10;
inline constexpr ArtifactGroup kAllGroups[kNumGroups] = {
    ArtifactGroup::Shapes,        ArtifactGroup::LinePixelation,
    ArtifactGroup::Shader,        ArtifactGroup::MorseCode,
    ArtifactGroup::ParallelLines, ArtifactGroup::DottedLines,
    ArtifactGroup::Stuttering,    ArtifactGroup::Triangulation,
    ArtifactGroup::Discoloration, ArtifactGroup::Tearing,
};

std::string to_string(ArtifactGroup group);
ArtifactGroup artifact_group_from_string(const std::string& name);
ArtifactGroup group_of(ArtifactKind kind);

enum class FeatureChain { FtResize, FtResizePca, ResizeHog, AnomalyDilation };

std::string to_string(FeatureChain chain);
FeatureChain feature_chain_from_string(const std::string& name);

struct ChainParams {
    int side = 64;         // spectral feature edge; output length side^2
    int resize_w = 256;    // image-space resize ahead of HOG
    int resize_h = 144;
    int patch = 16;
    int bins = 9;
    int k = 128;           // PCA components
    int dilate_radius = 2;
};

/// One row of the per-artifact model table.
struct PipelineSpec {
    ArtifactGroup artifact = ArtifactGroup::Shapes;
    FeatureChain chain = FeatureChain::FtResize;
    LearnerKind learner = LearnerKind::LR;
    ChainParams params;

    std::string pipeline_id() const;
    nlohmann::json to_json() const;
    static PipelineSpec from_json(const nlohmann::json& j);
};

/// The ten specialist rows: feature chain and classifier per artifact.
std::vector<PipelineSpec> default_pipeline_table();

/// Runs the feature chain on one image. AnomalyDilation reduces to a
/// length-1 vector holding the max of the dilated map. pca must be given
/// exactly when the chain contains a PCA step.
FeatureVector extract(const PipelineSpec& spec, const Image& img, const PcaModel* pca = nullptr);

struct EvalReport {
    int tp = 0;
    int fp = 0;
    int tn = 0;
    int fn = 0;
    double accuracy = 0.0;
    std::optional<double> precision;  // absent when tp+fp = 0
    std::optional<double> recall;     // absent when tp+fn = 0
    // per artifact kind: {total corrupted, detected}
    std::map<std::string, std::pair<int, int>> per_artifact;

    static EvalReport from_counts(int tp, int fp, int tn, int fn);
    nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
    std::string summary_text() const;
};

struct SpecialistModel {
    PipelineSpec spec;
    TrainedModel model;
    std::optional<PcaModel> pca;
    EvalReport held_in;  // on the held-out half of the training data
};

struct LabeledImage {
    Image image;
    bool corrupted = false;
    std::optional<ArtifactKind> kind;  // set iff corrupted
};

/// Stage-I training: stratified 50/50 train/test split of the given
/// images, PCA (when the chain uses it) fitted on the training half only,
/// learner trained on the training half, held-in report on the other.
SpecialistModel train_specialist(const PipelineSpec& spec, const std::vector<Image>& normals,
                                 const std::vector<Image>& corrupted, std::uint64_t seed);

struct EnsembleModel {
    std::vector<SpecialistModel> specialists;  // kAllGroups order
    TrainedModel combiner;                     // LR over the 10 probabilities
    EvalReport held_in;                        // on the 25% ensemble test split
};

/// Probabilities of all ten specialists in kAllGroups order.
std::array<double, kNumGroups> specialist_outputs(const EnsembleModel& ensemble,
                                                  const Image& img);

/// Stage-II training: combiner logistic regression over specialist
/// probabilities, stratified 75/25 train/test split.
EnsembleModel train_ensemble(std::vector<SpecialistModel> specialists,
                             const std::vector<Image>& b_normals,
                             const std::vector<Image>& b_corrupted, std::uint64_t seed);

struct Prediction {
    bool corrupted = false;
    double probability = 0.0;
    std::array<double, kNumGroups> specialist_scores{};
};

Prediction predict(const EnsembleModel& ensemble, const Image& img);

/// Stage-III evaluation with per-artifact recall breakdown.
EvalReport evaluate(const EnsembleModel& ensemble, const std::vector<LabeledImage>& items);

}  // namespace glitchkit
