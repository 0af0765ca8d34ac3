#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "glitchkit/pipeline.hpp"

namespace glitchkit {

/// Assignment of corpus sources to the three stages: A trains the
/// specialists, B trains the combiner, C is the holdout. A source belongs
/// to exactly one split.
struct SplitPlan {
    std::map<std::string, char> assignment;  // value in {'A','B','C'}

    char split_of(const std::string& source) const;
    nlohmann::json to_json() const;
    static SplitPlan from_json(const nlohmann::json& j);
    static SplitPlan load(const std::filesystem::path& path);
};

struct ManifestRecord {
    std::string path;  // relative to the manifest's directory
    bool corrupted = false;
    std::optional<ArtifactKind> kind;   // present iff corrupted
    std::string source;
    char split = 'A';
    std::optional<GlitchSpec> spec;     // present iff corrupted
};

struct CorpusManifest {
    int version = 1;
    std::uint64_t corpus_seed = 0;
    std::vector<ManifestRecord> records;

    nlohmann::json to_json() const;
    static CorpusManifest from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static CorpusManifest load(const std::filesystem::path& path);

    /// source -> split map derived from the records; throws if any source
    /// appears under more than one split.
    std::map<std::string, char> source_splits() const;
};

struct BuildCorpusOptions {
    std::filesystem::path clean_dir;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    int per_artifact = 10;  // corrupted images per artifact kind
    int normals = 110;      // normal records in total
    SplitPlan plan;
    bool force = false;  // allow writing into a non-empty out_dir
};

/// Builds a corpus from per-source subdirectories of clean PNG frames:
/// copies the chosen normals, renders the corrupted frames with per-image
/// child seeds, and writes manifest.json into out_dir. Byte-identical for
/// identical inputs and options.
CorpusManifest build_corpus(const BuildCorpusOptions& opts);

struct ModelBundle {
    int version = 1;
    std::string created_at;
    std::uint64_t train_seed = 0;
    std::string manifest_digest;
    EnsembleModel ensemble;

    nlohmann::json to_json() const;
    static ModelBundle from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static ModelBundle load(const std::filesystem::path& path);
};

/// Stages I and II driven by the manifest splits: specialists on A (with
/// the normal pool partitioned round-robin so their normal sets are
/// mutually exclusive), combiner on B. Throws on split-plan violations.
ModelBundle train_from_manifest(const CorpusManifest& manifest,
                                const std::filesystem::path& base_dir, std::uint64_t seed,
                                const std::vector<PipelineSpec>& table = default_pipeline_table());

/// Loads every record of one split and runs the ensemble over it.
EvalReport evaluate_manifest_split(const ModelBundle& bundle, const CorpusManifest& manifest,
                                   const std::filesystem::path& base_dir, char split);

/// FNV-1a 64-bit digest of a file's bytes, as "fnv1a64:<hex>".
std::string file_digest(const std::filesystem::path& path);

nlohmann::json pca_to_json(const PcaModel& model);
PcaModel pca_from_json(const nlohmann::json& j);

}  // namespace glitchkit
