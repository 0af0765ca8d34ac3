#include "glitchkit/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "glitchkit/png_io.hpp"

namespace glitchkit {

namespace fs = std::filesystem;

namespace {

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string timestamp_utc() {
    // honor SOURCE_DATE_EPOCH so reproducible builds stay byte-identical
    std::time_t now;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        now = std::time(nullptr);
    }
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace

char SplitPlan::split_of(const std::string& source) const {
    const auto it = assignment.find(source);
    if (it == assignment.end()) {
        throw std::invalid_argument("split plan does not assign source: " + source);
    }
    return it->second;
}

nlohmann::json SplitPlan::to_json() const {
    nlohmann::json j{{"A", nlohmann::json::array()},
                     {"B", nlohmann::json::array()},
                     {"C", nlohmann::json::array()}};
    for (const auto& [source, split] : assignment) j[std::string(1, split)].push_back(source);
    return j;
}

SplitPlan SplitPlan::from_json(const nlohmann::json& j) {
    SplitPlan plan;
    for (const char* key : {"A", "B", "C"}) {
        if (!j.contains(key)) continue;
        for (const auto& source : j.at(key)) {
            const std::string name = source.get<std::string>();
            if (plan.assignment.count(name)) {
                throw std::invalid_argument("split plan assigns source twice: " + name);
            }
            plan.assignment[name] = key[0];
        }
    }
    if (plan.assignment.empty()) throw std::invalid_argument("split plan assigns no sources");
    return plan;
}

SplitPlan SplitPlan::load(const fs::path& path) {
    return from_json(nlohmann::json::parse(read_text_file(path)));
}

nlohmann::json CorpusManifest::to_json() const {
    nlohmann::json recs = nlohmann::json::array();
    for (const ManifestRecord& r : records) {
        nlohmann::json jr{{"path", r.path},
                          {"label", r.corrupted ? "corrupted" : "normal"},
                          {"source", r.source},
                          {"split", std::string(1, r.split)}};
        if (r.corrupted) {
            if (!r.kind || !r.spec) {
                throw std::logic_error("corrupted record missing kind/spec: " + r.path);
            }
            jr["kind"] = glitchkit::to_string(*r.kind);
            jr["spec"] = r.spec->to_json();
        }
        recs.push_back(std::move(jr));
    }
    return nlohmann::json{
        {"version", version}, {"corpus_seed", corpus_seed}, {"records", recs}};
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& j) {
    CorpusManifest manifest;
    manifest.version = j.at("version").get<int>();
    manifest.corpus_seed = j.at("corpus_seed").get<std::uint64_t>();
    for (const auto& jr : j.at("records")) {
        ManifestRecord r;
        r.path = jr.at("path").get<std::string>();
        const std::string label = jr.at("label").get<std::string>();
        if (label != "normal" && label != "corrupted") {
            throw std::invalid_argument("manifest record has unknown label: " + label);
        }
        r.corrupted = label == "corrupted";
        r.source = jr.at("source").get<std::string>();
        const std::string split = jr.at("split").get<std::string>();
        if (split.size() != 1 || (split[0] != 'A' && split[0] != 'B' && split[0] != 'C')) {
            throw std::invalid_argument("manifest record has unknown split: " + split);
        }
        r.split = split[0];
        if (r.corrupted != jr.contains("kind") || r.corrupted != jr.contains("spec")) {
            throw std::invalid_argument("manifest record label/kind/spec mismatch: " + r.path);
        }
        if (r.corrupted) {
            r.kind = artifact_kind_from_string(jr.at("kind").get<std::string>());
            r.spec = GlitchSpec::from_json(jr.at("spec"));
        }
        manifest.records.push_back(std::move(r));
    }
    return manifest;
}

void CorpusManifest::save(const fs::path& path) const {
    write_text_file(path, to_json().dump(2) + "\n");
}

CorpusManifest CorpusManifest::load(const fs::path& path) {
    return from_json(nlohmann::json::parse(read_text_file(path)));
}

std::map<std::string, char> CorpusManifest::source_splits() const {
    std::map<std::string, char> splits;
    for (const ManifestRecord& r : records) {
        const auto [it, inserted] = splits.emplace(r.source, r.split);
        if (!inserted && it->second != r.split) {
            throw std::invalid_argument("split-plan violation: source '" + r.source +
                                        "' appears in splits " + std::string(1, it->second) +
                                        " and " + std::string(1, r.split));
        }
    }
    return splits;
}

// ---------------------------------------------------------------------------
// Corpus building
// ---------------------------------------------------------------------------

namespace {

struct Source {
    std::string name;
    std::vector<fs::path> files;  // sorted
    std::size_t cursor = 0;

    const fs::path& next_file() {
        const fs::path& f = files[cursor % files.size()];
        ++cursor;
        return f;
    }
};

std::vector<Source> scan_sources(const fs::path& clean_dir) {
    if (!fs::is_directory(clean_dir)) {
        throw std::invalid_argument("clean dir does not exist: " + clean_dir.string());
    }
    std::vector<Source> sources;
    for (const auto& entry : fs::directory_iterator(clean_dir)) {
        if (!entry.is_directory()) continue;
        Source src;
        src.name = entry.path().filename().string();
        for (const auto& file : fs::directory_iterator(entry.path())) {
            if (file.is_regular_file() && file.path().extension() == ".png") {
                src.files.push_back(file.path());
            }
        }
        if (src.files.empty()) {
            throw std::invalid_argument("source has no PNG files: " + src.name);
        }
        std::sort(src.files.begin(), src.files.end());
        sources.push_back(std::move(src));
    }
    if (sources.empty()) {
        throw std::invalid_argument("clean dir has no source subdirectories: " +
                                    clean_dir.string());
    }
    std::sort(sources.begin(), sources.end(),
              [](const Source& a, const Source& b) { return a.name < b.name; });
    return sources;
}

}  // namespace

CorpusManifest build_corpus(const BuildCorpusOptions& opts) {
    if (opts.per_artifact < 0 || opts.normals < 0) {
        throw std::invalid_argument("build_corpus: negative counts");
    }
    std::vector<Source> sources = scan_sources(opts.clean_dir);
    for (const Source& src : sources) opts.plan.split_of(src.name);  // every source assigned

    if (fs::exists(opts.out_dir) && !fs::is_empty(opts.out_dir) && !opts.force) {
        throw std::invalid_argument("output dir exists and is not empty (use force): " +
                                    opts.out_dir.string());
    }
    fs::create_directories(opts.out_dir / "normal");

    CorpusManifest manifest;
    manifest.corpus_seed = opts.seed;
    const Rng root(opts.seed);

    // normals: byte-identical copies, round-robin over sources
    for (int i = 0; i < opts.normals; ++i) {
        Source& src = sources[static_cast<std::size_t>(i) % sources.size()];
        const fs::path& clean = src.next_file();
        char name[64];
        std::snprintf(name, sizeof name, "normal/%05d_%s.png", i, src.name.c_str());
        fs::copy_file(clean, opts.out_dir / name, fs::copy_options::overwrite_existing);
        ManifestRecord r;
        r.path = name;
        r.corrupted = false;
        r.source = src.name;
        r.split = opts.plan.split_of(src.name);
        manifest.records.push_back(std::move(r));
    }

    // corrupted: per-kind counts, per-image child seeds off the corpus seed
    std::uint64_t record_index = 0;
    for (ArtifactKind kind : kAllArtifactKinds) {
        const std::string kind_name = glitchkit::to_string(kind);
        fs::create_directories(opts.out_dir / "corrupted" / kind_name);
        for (int i = 0; i < opts.per_artifact; ++i, ++record_index) {
            Source& src = sources[static_cast<std::size_t>(i) % sources.size()];
            const fs::path clean = src.next_file();
            const Image img = read_png(clean);

            Rng child = root.child(record_index);
            GlitchResult result = [&] {
                if (kind != ArtifactKind::Tearing) return apply(kind, img, nullptr, child);
                // tearing pairs within the source; single-image sources fall
                // back to a synthesized partner
                if (src.files.size() < 2) return apply(kind, img, nullptr, child);
                const Image aux = read_png(src.next_file());
                if (aux.width() != img.width() || aux.height() != img.height()) {
                    return apply(kind, img, nullptr, child);
                }
                return apply(kind, img, &aux, child);
            }();

            char name[96];
            std::snprintf(name, sizeof name, "corrupted/%s/%05d_%s.png", kind_name.c_str(), i,
                          src.name.c_str());
            write_png(result.first, opts.out_dir / name);

            ManifestRecord r;
            r.path = name;
            r.corrupted = true;
            r.kind = kind;
            r.source = src.name;
            r.split = opts.plan.split_of(src.name);
            r.spec = std::move(result.second);
            manifest.records.push_back(std::move(r));
        }
    }

    manifest.save(opts.out_dir / "manifest.json");
    return manifest;
}

// ---------------------------------------------------------------------------
// Training and evaluation from a manifest
// ---------------------------------------------------------------------------

ModelBundle train_from_manifest(const CorpusManifest& manifest, const fs::path& base_dir,
                                std::uint64_t seed, const std::vector<PipelineSpec>& table) {
    if (table.size() != kNumGroups) {
        throw std::invalid_argument("train_from_manifest: pipeline table must have 10 rows");
    }
    const std::map<std::string, char> splits = manifest.source_splits();  // throws on violation

    std::vector<const ManifestRecord*> a_normals;
    std::vector<const ManifestRecord*> b_normals;
    std::vector<const ManifestRecord*> b_corrupted;
    std::map<ArtifactGroup, std::vector<const ManifestRecord*>> a_corrupted;
    for (const ManifestRecord& r : manifest.records) {
        if (r.split == 'A') {
            if (r.corrupted) {
                a_corrupted[group_of(*r.kind)].push_back(&r);
            } else {
                a_normals.push_back(&r);
            }
        } else if (r.split == 'B') {
            (r.corrupted ? b_corrupted : b_normals).push_back(&r);
        }
    }
    if (a_normals.empty()) throw std::invalid_argument("train: split A has no normal images");
    if (b_normals.empty() || b_corrupted.empty()) {
        throw std::invalid_argument("train: split B needs both classes");
    }

    auto load_all = [&](const std::vector<const ManifestRecord*>& recs) {
        std::vector<Image> images;
        images.reserve(recs.size());
        for (const ManifestRecord* r : recs) images.push_back(read_png(base_dir / r->path));
        return images;
    };

    const Rng root(seed);
    ModelBundle bundle;
    bundle.created_at = timestamp_utc();
    bundle.train_seed = seed;

    // stage I: specialists with mutually exclusive normal pools
    std::vector<SpecialistModel> specialists;
    for (int g = 0; g < kNumGroups; ++g) {
        const PipelineSpec& spec = table[g];
        if (spec.artifact != kAllGroups[g]) {
            throw std::invalid_argument("train_from_manifest: table must follow group order");
        }
        std::vector<const ManifestRecord*> normal_recs;
        for (std::size_t i = static_cast<std::size_t>(g); i < a_normals.size(); i += kNumGroups) {
            normal_recs.push_back(a_normals[i]);
        }
        const auto cit = a_corrupted.find(spec.artifact);
        if (normal_recs.empty() || cit == a_corrupted.end() || cit->second.empty()) {
            throw std::invalid_argument("train: split A lacks data for group " +
                                        glitchkit::to_string(spec.artifact));
        }
        const std::vector<Image> normals = load_all(normal_recs);
        const std::vector<Image> corrupted = load_all(cit->second);
        specialists.push_back(
            train_specialist(spec, normals, corrupted, root.child(static_cast<std::uint64_t>(g)).seed()));
    }

    // stage II: combiner on B, never seen by the specialists
    const std::vector<Image> bn = load_all(b_normals);
    const std::vector<Image> bc = load_all(b_corrupted);
    bundle.ensemble = train_ensemble(std::move(specialists), bn, bc, root.child(1000).seed());
    return bundle;
}

EvalReport evaluate_manifest_split(const ModelBundle& bundle, const CorpusManifest& manifest,
                                   const fs::path& base_dir, char split) {
    std::vector<LabeledImage> items;
    for (const ManifestRecord& r : manifest.records) {
        if (r.split != split) continue;
        LabeledImage item;
        item.image = read_png(base_dir / r.path);
        item.corrupted = r.corrupted;
        item.kind = r.kind;
        items.push_back(std::move(item));
    }
    if (items.empty()) {
        throw std::invalid_argument(std::string("evaluate: no records in split ") + split);
    }
    return evaluate(bundle.ensemble, items);
}

// ---------------------------------------------------------------------------
// Bundle serialization
// ---------------------------------------------------------------------------

nlohmann::json pca_to_json(const PcaModel& model) {
    return nlohmann::json{{"k", model.k},
                          {"mean", model.mean},
                          {"components", model.components},
                          {"singular_values", model.singular_values}};
}

PcaModel pca_from_json(const nlohmann::json& j) {
    PcaModel model;
    model.k = j.at("k").get<int>();
    model.mean = j.at("mean").get<std::vector<double>>();
    model.components = j.at("components").get<std::vector<std::vector<double>>>();
    model.singular_values = j.at("singular_values").get<std::vector<double>>();
    return model;
}

nlohmann::json ModelBundle::to_json() const {
    nlohmann::json specialists = nlohmann::json::array();
    for (const SpecialistModel& sp : ensemble.specialists) {
        nlohmann::json js{{"spec", sp.spec.to_json()},
                          {"model", model_to_json(sp.model)},
                          {"held_in", sp.held_in.to_json()}};
        js["pca"] = sp.pca ? pca_to_json(*sp.pca) : nlohmann::json(nullptr);
        specialists.push_back(std::move(js));
    }
    return nlohmann::json{{"version", version},
                          {"created_at", created_at},
                          {"train_seed", train_seed},
                          {"manifest_digest", manifest_digest},
                          {"specialists", specialists},
                          {"combiner", model_to_json(ensemble.combiner)},
                          {"ensemble_held_in", ensemble.held_in.to_json()}};
}

ModelBundle ModelBundle::from_json(const nlohmann::json& j) {
    ModelBundle bundle;
    bundle.version = j.at("version").get<int>();
    bundle.created_at = j.at("created_at").get<std::string>();
    bundle.train_seed = j.at("train_seed").get<std::uint64_t>();
    bundle.manifest_digest = j.at("manifest_digest").get<std::string>();
    for (const auto& js : j.at("specialists")) {
        SpecialistModel sp;
        sp.spec = PipelineSpec::from_json(js.at("spec"));
        sp.model = model_from_json(js.at("model"));
        sp.held_in = EvalReport::from_json(js.at("held_in"));
        if (!js.at("pca").is_null()) sp.pca = pca_from_json(js.at("pca"));
        bundle.ensemble.specialists.push_back(std::move(sp));
    }
    bundle.ensemble.combiner = model_from_json(j.at("combiner"));
    bundle.ensemble.held_in = EvalReport::from_json(j.at("ensemble_held_in"));
    return bundle;
}

void ModelBundle::save(const fs::path& path) const {
    write_text_file(path, to_json().dump(2) + "\n");
}

ModelBundle ModelBundle::load(const fs::path& path) {
    return from_json(nlohmann::json::parse(read_text_file(path)));
}

std::string file_digest(const fs::path& path) {
    const std::string bytes = read_text_file(path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace glitchkit
