// glitchkit command line: synthesize corruptions, build corpora, train the
// specialist/ensemble stack, evaluate, and score single frames.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "glitchkit/dataset.hpp"
#include "glitchkit/glitch.hpp"
#include "glitchkit/png_io.hpp"

namespace fs = std::filesystem;
using namespace glitchkit;

namespace {

constexpr int kExitError = 2;

int run_glitchify(const std::string& in_path, const std::string& out_path,
                  const std::string& kind_name, std::uint64_t seed, const std::string& aux_path) {
    const ArtifactKind kind = artifact_kind_from_string(kind_name);
    const Image img = read_png(in_path);
    Image aux;
    const Image* aux_ptr = nullptr;
    if (!aux_path.empty()) {
        aux = read_png(aux_path);
        aux_ptr = &aux;
    }
    Rng rng(seed);
    GlitchResult result = apply(kind, img, aux_ptr, rng);
    write_png(result.first, out_path);
    std::cout << result.second.to_json().dump(2) << "\n";
    return 0;
}

int run_corpus_build(const std::string& clean, const std::string& out, std::uint64_t seed,
                     int per_artifact, int normals, const std::string& plan_path, bool force) {
    BuildCorpusOptions opts;
    opts.clean_dir = clean;
    opts.out_dir = out;
    opts.seed = seed;
    opts.per_artifact = per_artifact;
    opts.normals = normals;
    opts.plan = SplitPlan::load(plan_path);
    opts.force = force;
    const CorpusManifest manifest = build_corpus(opts);
    std::cout << "wrote " << manifest.records.size() << " records to " << out << "/manifest.json\n";
    return 0;
}

int run_train(const std::string& manifest_path, const std::string& out_path, std::uint64_t seed) {
    const fs::path mpath(manifest_path);
    const CorpusManifest manifest = CorpusManifest::load(mpath);
    ModelBundle bundle = train_from_manifest(manifest, mpath.parent_path(), seed);
    bundle.manifest_digest = file_digest(mpath);
    bundle.save(out_path);
    std::cout << "stage I held-in accuracy per specialist:\n";
    for (const SpecialistModel& sp : bundle.ensemble.specialists) {
        std::cout << "  " << to_string(sp.spec.artifact) << ": " << sp.held_in.accuracy << "\n";
    }
    std::cout << "stage II (combiner) held-in: " << bundle.ensemble.held_in.summary_text();
    std::cout << "saved bundle to " << out_path << "\n";
    return 0;
}

int run_eval(const std::string& bundle_path, const std::string& manifest_path,
             const std::string& split, const std::string& report_path) {
    if (split.size() != 1 || (split != "A" && split != "B" && split != "C")) {
        throw std::invalid_argument("--split must be A, B, or C");
    }
    const fs::path mpath(manifest_path);
    const ModelBundle bundle = ModelBundle::load(bundle_path);
    const CorpusManifest manifest = CorpusManifest::load(mpath);
    const EvalReport report =
        evaluate_manifest_split(bundle, manifest, mpath.parent_path(), split[0]);
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write report: " + report_path);
        out << report.to_json().dump(2) << "\n";
    }
    std::cout << "split " << split << ": " << report.summary_text();
    return 0;
}

int run_predict(const std::string& bundle_path, const std::string& image_path) {
    const ModelBundle bundle = ModelBundle::load(bundle_path);
    const Image img = read_png(image_path);
    const Prediction pred = predict(bundle.ensemble, img);

    nlohmann::json scores = nlohmann::json::object();
    for (int i = 0; i < kNumGroups; ++i) {
        scores[to_string(kAllGroups[i])] = pred.specialist_scores[i];
    }
    const nlohmann::json out{{"decision", pred.corrupted ? "corrupted" : "normal"},
                             {"probability", pred.probability},
                             {"specialist_scores", scores}};
    std::cout << out.dump(2) << "\n";
    return pred.corrupted ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic gaming-artifact generation and detection toolkit"};
    app.require_subcommand(1);

    // glitchify
    std::string g_in, g_out, g_kind, g_aux;
    std::uint64_t g_seed = 0;
    auto* glitchify = app.add_subcommand("glitchify", "corrupt a single PNG frame");
    glitchify->add_option("input", g_in, "clean input PNG")->required();
    glitchify->add_option("output", g_out, "corrupted output PNG")->required();
    glitchify->add_option("--kind", g_kind, "artifact kind")->required();
    glitchify->add_option("--seed", g_seed, "generator seed")->required();
    glitchify->add_option("--aux", g_aux, "second frame (tearing)");

    // corpus build
    std::string c_clean, c_out, c_plan;
    std::uint64_t c_seed = 0;
    int c_per_artifact = 10;
    int c_normals = 110;
    bool c_force = false;
    auto* corpus = app.add_subcommand("corpus", "corpus operations");
    auto* corpus_build = corpus->add_subcommand("build", "build a labeled corpus");
    corpus_build->add_option("--clean", c_clean, "directory of per-source clean PNGs")->required();
    corpus_build->add_option("--out", c_out, "output corpus directory")->required();
    corpus_build->add_option("--seed", c_seed, "corpus seed")->required();
    corpus_build->add_option("--per-artifact", c_per_artifact, "corrupted images per kind");
    corpus_build->add_option("--normals", c_normals, "normal images in total");
    corpus_build->add_option("--plan", c_plan, "split plan JSON")->required();
    corpus_build->add_flag("--force", c_force, "write into a non-empty output dir");

    // train
    std::string t_manifest, t_out;
    std::uint64_t t_seed = 0;
    auto* train = app.add_subcommand("train", "train specialists and the ensemble");
    train->add_option("--manifest", t_manifest, "corpus manifest")->required();
    train->add_option("--out", t_out, "output model bundle")->required();
    train->add_option("--seed", t_seed, "training seed")->required();

    // eval
    std::string e_bundle, e_manifest, e_split = "C", e_report;
    auto* eval = app.add_subcommand("eval", "evaluate a bundle on a manifest split");
    eval->add_option("--bundle", e_bundle, "model bundle")->required();
    eval->add_option("--manifest", e_manifest, "corpus manifest")->required();
    eval->add_option("--split", e_split, "split to evaluate (A/B/C)");
    eval->add_option("--report", e_report, "write the EvalReport JSON here");

    // predict
    std::string p_bundle, p_image;
    auto* predict_cmd = app.add_subcommand("predict", "score one image (exit 1 = corrupted)");
    predict_cmd->add_option("--bundle", p_bundle, "model bundle")->required();
    predict_cmd->add_option("image", p_image, "PNG to score")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (glitchify->parsed()) return run_glitchify(g_in, g_out, g_kind, g_seed, g_aux);
        if (corpus_build->parsed()) {
            return run_corpus_build(c_clean, c_out, c_seed, c_per_artifact, c_normals, c_plan,
                                    c_force);
        }
        if (train->parsed()) return run_train(t_manifest, t_out, t_seed);
        if (eval->parsed()) return run_eval(e_bundle, e_manifest, e_split, e_report);
        if (predict_cmd->parsed()) return run_predict(p_bundle, p_image);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::cerr << "error: no subcommand\n";
    return kExitError;
}
