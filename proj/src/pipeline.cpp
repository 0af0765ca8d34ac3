#include "glitchkit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace glitchkit {

std::string to_string(ArtifactGroup group) {
    switch (group) {
        case ArtifactGroup::Shapes: return "shapes";
        case ArtifactGroup::LinePixelation: return "line_pixelation";
        case ArtifactGroup::Shader: return "shader";
        case ArtifactGroup::MorseCode: return "morse_code";
        case ArtifactGroup::ParallelLines: return "parallel_lines";
        case ArtifactGroup::DottedLines: return "dotted_lines";
        case ArtifactGroup::Stuttering: return "stuttering";
        case ArtifactGroup::Triangulation: return "triangulation";
        case ArtifactGroup::Discoloration: return "discoloration";
        case ArtifactGroup::Tearing: return "tearing";
    }
    throw std::logic_error("unknown artifact group");
}

ArtifactGroup artifact_group_from_string(const std::string& name) {
    for (ArtifactGroup group : kAllGroups) {
        if (to_string(group) == name) return group;
    }
    throw std::invalid_argument("unknown artifact group: " + name);
}

ArtifactGroup group_of(ArtifactKind kind) {
    switch (kind) {
        case ArtifactKind::Shader: return ArtifactGroup::Shader;
        case ArtifactKind::Shapes: return ArtifactGroup::Shapes;
        case ArtifactKind::Discoloration: return ArtifactGroup::Discoloration;
        case ArtifactKind::MorseCode: return ArtifactGroup::MorseCode;
        case ArtifactKind::DottedLinesRandom:
        case ArtifactKind::DottedLinesRadial: return ArtifactGroup::DottedLines;
        case ArtifactKind::ParallelLines: return ArtifactGroup::ParallelLines;
        case ArtifactKind::Triangulation: return ArtifactGroup::Triangulation;
        case ArtifactKind::LinePixelation: return ArtifactGroup::LinePixelation;
        case ArtifactKind::Stuttering: return ArtifactGroup::Stuttering;
        case ArtifactKind::Tearing: return ArtifactGroup::Tearing;
    }
    throw std::logic_error("unknown artifact kind");
}

std::string to_string(FeatureChain chain) {
    switch (chain) {
        case FeatureChain::FtResize: return "ft_resize";
        case FeatureChain::FtResizePca: return "ft_resize_pca";
        case FeatureChain::ResizeHog: return "resize_hog";
        case FeatureChain::AnomalyDilation: return "anomaly_dilation";
    }
    throw std::logic_error("unknown feature chain");
}

FeatureChain feature_chain_from_string(const std::string& name) {
    for (FeatureChain chain : {FeatureChain::FtResize, FeatureChain::FtResizePca,
                               FeatureChain::ResizeHog, FeatureChain::AnomalyDilation}) {
        if (to_string(chain) == name) return chain;
    }
    throw std::invalid_argument("unknown feature chain: " + name);
}

std::string PipelineSpec::pipeline_id() const {
    std::ostringstream id;
    switch (chain) {
        case FeatureChain::FtResize: id << "ft" << params.side; break;
        case FeatureChain::FtResizePca: id << "ft" << params.side << "+pca" << params.k; break;
        case FeatureChain::ResizeHog:
            id << "resize" << params.resize_w << "x" << params.resize_h << "+hog p" << params.patch
               << " b" << params.bins;
            break;
        case FeatureChain::AnomalyDilation: id << "anomaly+dilate" << params.dilate_radius; break;
    }
    id << "|" << glitchkit::to_string(learner);
    return id.str();
}

nlohmann::json PipelineSpec::to_json() const {
    return nlohmann::json{{"artifact", glitchkit::to_string(artifact)},
                          {"chain", glitchkit::to_string(chain)},
                          {"learner", glitchkit::to_string(learner)},
                          {"params",
                           {{"side", params.side},
                            {"resize_w", params.resize_w},
                            {"resize_h", params.resize_h},
                            {"patch", params.patch},
                            {"bins", params.bins},
                            {"k", params.k},
                            {"dilate_radius", params.dilate_radius}}}};
}

PipelineSpec PipelineSpec::from_json(const nlohmann::json& j) {
    PipelineSpec spec;
    spec.artifact = artifact_group_from_string(j.at("artifact").get<std::string>());
    spec.chain = feature_chain_from_string(j.at("chain").get<std::string>());
    spec.learner = learner_kind_from_string(j.at("learner").get<std::string>());
    const auto& p = j.at("params");
    spec.params.side = p.at("side").get<int>();
    spec.params.resize_w = p.at("resize_w").get<int>();
    spec.params.resize_h = p.at("resize_h").get<int>();
    spec.params.patch = p.at("patch").get<int>();
    spec.params.bins = p.at("bins").get<int>();
    spec.params.k = p.at("k").get<int>();
    spec.params.dilate_radius = p.at("dilate_radius").get<int>();
    return spec;
}

std::vector<PipelineSpec> default_pipeline_table() {
    auto row = [](ArtifactGroup group, FeatureChain chain, LearnerKind learner) {
        PipelineSpec spec;
        spec.artifact = group;
        spec.chain = chain;
        spec.learner = learner;
        return spec;
    };
    return {
        row(ArtifactGroup::Shapes, FeatureChain::FtResize, LearnerKind::LR),
        row(ArtifactGroup::LinePixelation, FeatureChain::AnomalyDilation, LearnerKind::Threshold),
        row(ArtifactGroup::Shader, FeatureChain::ResizeHog, LearnerKind::LR),
        row(ArtifactGroup::MorseCode, FeatureChain::FtResize, LearnerKind::SVC),
        row(ArtifactGroup::ParallelLines, FeatureChain::FtResizePca, LearnerKind::LR),
        row(ArtifactGroup::DottedLines, FeatureChain::FtResizePca, LearnerKind::LR),
        row(ArtifactGroup::Stuttering, FeatureChain::FtResizePca, LearnerKind::LR),
        row(ArtifactGroup::Triangulation, FeatureChain::FtResizePca, LearnerKind::LDA),
        row(ArtifactGroup::Discoloration, FeatureChain::FtResizePca, LearnerKind::LR),
        row(ArtifactGroup::Tearing, FeatureChain::ResizeHog, LearnerKind::LR),
    };
}

namespace {

// chain output before any PCA step
FeatureVector base_feature(const PipelineSpec& spec, const Image& img) {
    switch (spec.chain) {
        case FeatureChain::FtResize:
        case FeatureChain::FtResizePca: return spectral_feature(img, spec.params.side);
        case FeatureChain::ResizeHog: {
            const Image small = resize(img, spec.params.resize_w, spec.params.resize_h);
            HogConfig cfg;
            cfg.patch = spec.params.patch;
            cfg.bins = spec.params.bins;
            const HogDescriptor desc = hog(to_gray(small), cfg);
            FeatureVector fv;
            fv.values = desc.values;
            fv.pipeline_id = "resize+hog";
            return fv;
        }
        case FeatureChain::AnomalyDilation: {
            const AnomalyMap dilated = dilate(anomaly_map(img), spec.params.dilate_radius);
            FeatureVector fv;
            // image-level score: max of the dilated map
            fv.values = {*std::max_element(dilated.scores.begin(), dilated.scores.end())};
            fv.pipeline_id = "anomaly+dilate";
            return fv;
        }
    }
    throw std::logic_error("unknown feature chain");
}

// base-feature cache key; chains with identical geometry share entries
std::string base_key(const PipelineSpec& spec) {
    switch (spec.chain) {
        case FeatureChain::FtResize:
        case FeatureChain::FtResizePca: return "ft" + std::to_string(spec.params.side);
        case FeatureChain::ResizeHog:
            return "hog" + std::to_string(spec.params.resize_w) + "x" +
                   std::to_string(spec.params.resize_h) + "p" + std::to_string(spec.params.patch) +
                   "b" + std::to_string(spec.params.bins);
        case FeatureChain::AnomalyDilation:
            return "anom" + std::to_string(spec.params.dilate_radius);
    }
    throw std::logic_error("unknown feature chain");
}

FeatureVector finish_feature(const PipelineSpec& spec, FeatureVector base, const PcaModel* pca) {
    if (spec.chain == FeatureChain::FtResizePca) {
        if (pca == nullptr) throw std::invalid_argument("extract: chain needs a fitted PCA model");
        base = pca_transform(*pca, base);
    }
    base.pipeline_id = spec.pipeline_id();
    return base;
}

// per-image cache so the ten specialists share DFT/HOG/anomaly work
class BaseFeatureCache {
public:
    explicit BaseFeatureCache(const Image& img) : img_(img) {}

    const FeatureVector& get(const PipelineSpec& spec) {
        const std::string key = base_key(spec);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, base_feature(spec, img_)).first;
        return it->second;
    }

private:
    const Image& img_;
    std::map<std::string, FeatureVector> cache_;
};

std::array<double, kNumGroups> specialist_outputs_cached(const EnsembleModel& ensemble,
                                                         BaseFeatureCache& cache) {
    if (ensemble.specialists.size() != kNumGroups) {
        throw std::invalid_argument("specialist_outputs: ensemble is missing specialists");
    }
    std::array<double, kNumGroups> out{};
    for (int i = 0; i < kNumGroups; ++i) {
        const SpecialistModel& sp = ensemble.specialists[i];
        if (sp.spec.artifact != kAllGroups[i]) {
            throw std::invalid_argument("specialist_outputs: specialists out of order");
        }
        const FeatureVector fv =
            finish_feature(sp.spec, cache.get(sp.spec), sp.pca ? &*sp.pca : nullptr);
        out[i] = predict_proba(sp.model, fv);
    }
    return out;
}

// deterministic stratified split: shuffle each class with the seed, put
// the first `ratio` share into train
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

SplitIndices stratified_split(const std::vector<int>& labels, double train_ratio,
                              std::uint64_t seed) {
    SplitIndices split;
    Rng rng(seed);
    for (int cls : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) idx.push_back(i);
        }
        for (std::size_t i = idx.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(idx[i - 1], idx[j]);
        }
        const auto cut = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(idx.size())));
        std::size_t n_train;
        if (idx.size() <= 1) {
            n_train = idx.size();  // lone samples train; the held-out side may miss a class
        } else {
            n_train = std::clamp<std::size_t>(cut, 1, idx.size() - 1);
        }
        for (std::size_t i = 0; i < idx.size(); ++i) {
            (i < n_train ? split.train : split.test).push_back(idx[i]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

TrainedModel train_learner(LearnerKind learner, const std::vector<FeatureVector>& x,
                           const std::vector<int>& y, std::uint64_t seed) {
    TrainedModel model;
    switch (learner) {
        case LearnerKind::LR: model = lr_train(x, y); break;
        case LearnerKind::LDA: model = lda_train(x, y); break;
        case LearnerKind::SVC: {
            // bound the kernel matrix: subsample oversized training sets
            constexpr std::size_t kSvcCap = 4000;
            if (x.size() > kSvcCap) {
                std::vector<std::size_t> idx(x.size());
                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                Rng rng(seed ^ 0x5bc7u);
                for (std::size_t i = idx.size(); i > 1; --i) {
                    const auto j =
                        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
                    std::swap(idx[i - 1], idx[j]);
                }
                std::vector<FeatureVector> xs;
                std::vector<int> ys;
                for (std::size_t i = 0; i < kSvcCap; ++i) {
                    xs.push_back(x[idx[i]]);
                    ys.push_back(y[idx[i]]);
                }
                model = svc_train(xs, ys);
            } else {
                model = svc_train(x, y);
            }
            break;
        }
        case LearnerKind::Threshold: {
            std::vector<double> scores;
            scores.reserve(x.size());
            for (const auto& fv : x) {
                if (fv.values.size() != 1) {
                    throw std::invalid_argument("threshold learner expects scalar features");
                }
                scores.push_back(fv.values.front());
            }
            model = threshold_train(scores, y);
            break;
        }
    }
    model.train_meta.seed = seed;
    return model;
}

}  // namespace

FeatureVector extract(const PipelineSpec& spec, const Image& img, const PcaModel* pca) {
    if (spec.chain != FeatureChain::FtResizePca && pca != nullptr) {
        throw std::invalid_argument("extract: chain has no PCA step");
    }
    return finish_feature(spec, base_feature(spec, img), pca);
}

EvalReport EvalReport::from_counts(int tp, int fp, int tn, int fn) {
    EvalReport report;
    report.tp = tp;
    report.fp = fp;
    report.tn = tn;
    report.fn = fn;
    const int total = tp + fp + tn + fn;
    if (total == 0) throw std::invalid_argument("EvalReport: empty evaluation set");
    report.accuracy = static_cast<double>(tp + tn) / total;
    if (tp + fp > 0) report.precision = static_cast<double>(tp) / (tp + fp);
    if (tp + fn > 0) report.recall = static_cast<double>(tp) / (tp + fn);
    return report;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j{{"tp", tp},       {"fp", fp},
                     {"tn", tn},       {"fn", fn},
                     {"accuracy", accuracy}};
    j["precision"] = precision ? nlohmann::json(*precision) : nlohmann::json(nullptr);
    j["recall"] = recall ? nlohmann::json(*recall) : nlohmann::json(nullptr);
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [kind, counts] : per_artifact) {
        per[kind] = {{"total", counts.first}, {"detected", counts.second}};
    }
    j["per_artifact"] = per;
    return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
    EvalReport report = EvalReport::from_counts(j.at("tp").get<int>(), j.at("fp").get<int>(),
                                                j.at("tn").get<int>(), j.at("fn").get<int>());
    for (const auto& [kind, counts] : j.at("per_artifact").items()) {
        report.per_artifact[kind] = {counts.at("total").get<int>(),
                                     counts.at("detected").get<int>()};
    }
    return report;
}

std::string EvalReport::summary_text() const {
    std::ostringstream out;
    out << "accuracy " << accuracy;
    out << "  precision ";
    if (precision) {
        out << *precision;
    } else {
        out << "n/a";
    }
    out << "  recall ";
    if (recall) {
        out << *recall;
    } else {
        out << "n/a";
    }
    out << "  (tp " << tp << ", fp " << fp << ", tn " << tn << ", fn " << fn << ")\n";
    if (!per_artifact.empty()) {
        out << "per-artifact recall:\n";
        for (const auto& [kind, counts] : per_artifact) {
            out << "  " << kind << ": " << counts.second << "/" << counts.first << "\n";
        }
    }
    return out.str();
}

SpecialistModel train_specialist(const PipelineSpec& spec, const std::vector<Image>& normals,
                                 const std::vector<Image>& corrupted, std::uint64_t seed) {
    if (normals.empty() || corrupted.empty()) {
        throw std::invalid_argument("train_specialist: both classes must be nonempty");
    }

    std::vector<const Image*> images;
    std::vector<int> labels;
    for (const Image& img : normals) {
        images.push_back(&img);
        labels.push_back(0);
    }
    for (const Image& img : corrupted) {
        images.push_back(&img);
        labels.push_back(1);
    }

    const SplitIndices split = stratified_split(labels, 0.5, seed);

    // base features for every image; PCA (if any) is fitted on the
    // training half only, then applied everywhere
    std::vector<FeatureVector> base(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) base[i] = base_feature(spec, *images[i]);

    SpecialistModel specialist;
    specialist.spec = spec;
    if (spec.chain == FeatureChain::FtResizePca) {
        std::vector<FeatureVector> train_base;
        for (std::size_t i : split.train) train_base.push_back(base[i]);
        const int d = static_cast<int>(train_base.front().values.size());
        const int k = std::min({spec.params.k, static_cast<int>(train_base.size()), d});
        PcaConfig pca_cfg;
        pca_cfg.seed = seed ^ 0x9e37u;
        specialist.pca = pca_fit(train_base, k, pca_cfg);
    }

    auto chain_features = [&](const std::vector<std::size_t>& idx) {
        std::vector<FeatureVector> out;
        out.reserve(idx.size());
        for (std::size_t i : idx) {
            out.push_back(
                finish_feature(spec, base[i], specialist.pca ? &*specialist.pca : nullptr));
        }
        return out;
    };
    auto labels_of = [&](const std::vector<std::size_t>& idx) {
        std::vector<int> out;
        out.reserve(idx.size());
        for (std::size_t i : idx) out.push_back(labels[i]);
        return out;
    };

    const std::vector<FeatureVector> x_train = chain_features(split.train);
    const std::vector<int> y_train = labels_of(split.train);
    specialist.model = train_learner(spec.learner, x_train, y_train, seed);
    specialist.model.pipeline_id = spec.pipeline_id();

    const std::vector<FeatureVector> x_test = chain_features(split.test);
    const std::vector<int> y_test = labels_of(split.test);
    if (x_test.empty()) throw std::invalid_argument("train_specialist: empty held-out split");
    int tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < x_test.size(); ++i) {
        const bool pred = predict(specialist.model, x_test[i]);
        if (pred && y_test[i] == 1) ++tp;
        if (pred && y_test[i] == 0) ++fp;
        if (!pred && y_test[i] == 0) ++tn;
        if (!pred && y_test[i] == 1) ++fn;
    }
    specialist.held_in = EvalReport::from_counts(tp, fp, tn, fn);
    return specialist;
}

std::array<double, kNumGroups> specialist_outputs(const EnsembleModel& ensemble,
                                                  const Image& img) {
    BaseFeatureCache cache(img);
    return specialist_outputs_cached(ensemble, cache);
}

EnsembleModel train_ensemble(std::vector<SpecialistModel> specialists,
                             const std::vector<Image>& b_normals,
                             const std::vector<Image>& b_corrupted, std::uint64_t seed) {
    if (specialists.size() != kNumGroups) {
        throw std::invalid_argument("train_ensemble: expected one specialist per artifact group");
    }
    for (int i = 0; i < kNumGroups; ++i) {
        if (specialists[i].spec.artifact != kAllGroups[i]) {
            throw std::invalid_argument("train_ensemble: specialists must follow table order");
        }
    }
    if (b_normals.empty() || b_corrupted.empty()) {
        throw std::invalid_argument("train_ensemble: both classes must be nonempty");
    }

    EnsembleModel ensemble;
    ensemble.specialists = std::move(specialists);

    std::vector<FeatureVector> probs;
    std::vector<int> labels;
    auto push_outputs = [&](const Image& img, int label) {
        BaseFeatureCache cache(img);
        const auto out = specialist_outputs_cached(ensemble, cache);
        FeatureVector fv;
        fv.values.assign(out.begin(), out.end());
        fv.pipeline_id = "specialist_probs";
        probs.push_back(std::move(fv));
        labels.push_back(label);
    };
    for (const Image& img : b_normals) push_outputs(img, 0);
    for (const Image& img : b_corrupted) push_outputs(img, 1);

    const SplitIndices split = stratified_split(labels, 0.75, seed);
    std::vector<FeatureVector> x_train;
    std::vector<int> y_train;
    for (std::size_t i : split.train) {
        x_train.push_back(probs[i]);
        y_train.push_back(labels[i]);
    }
    ensemble.combiner = lr_train(x_train, y_train);
    ensemble.combiner.pipeline_id = "ensemble_lr";
    ensemble.combiner.train_meta.seed = seed;

    int tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i : split.test) {
        const bool pred = predict(ensemble.combiner, probs[i]);
        if (pred && labels[i] == 1) ++tp;
        if (pred && labels[i] == 0) ++fp;
        if (!pred && labels[i] == 0) ++tn;
        if (!pred && labels[i] == 1) ++fn;
    }
    ensemble.held_in = EvalReport::from_counts(tp, fp, tn, fn);
    return ensemble;
}

Prediction predict(const EnsembleModel& ensemble, const Image& img) {
    Prediction pred;
    pred.specialist_scores = specialist_outputs(ensemble, img);
    FeatureVector fv;
    fv.values.assign(pred.specialist_scores.begin(), pred.specialist_scores.end());
    pred.probability = predict_proba(ensemble.combiner, fv);
    pred.corrupted = pred.probability >= 0.5;
    return pred;
}

EvalReport evaluate(const EnsembleModel& ensemble, const std::vector<LabeledImage>& items) {
    if (items.empty()) throw std::invalid_argument("evaluate: empty labeled set");
    int tp = 0, fp = 0, tn = 0, fn = 0;
    std::map<std::string, std::pair<int, int>> per_artifact;
    for (const LabeledImage& item : items) {
        const Prediction pred = predict(ensemble, item.image);
        if (item.corrupted) {
            const std::string kind =
                item.kind ? glitchkit::to_string(*item.kind) : std::string("unknown");
            auto& counts = per_artifact[kind];
            ++counts.first;
            if (pred.corrupted) {
                ++tp;
                ++counts.second;
            } else {
                ++fn;
            }
        } else {
            if (pred.corrupted) {
                ++fp;
            } else {
                ++tn;
            }
        }
    }
    EvalReport report = EvalReport::from_counts(tp, fp, tn, fn);
    report.per_artifact = std::move(per_artifact);
    return report;
}

}  // namespace glitchkit
