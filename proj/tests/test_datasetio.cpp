#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "glitchkit/dataset.hpp"
#include "glitchkit/png_io.hpp"
#include "test_util.hpp"

using namespace glitchkit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// three-source clean tree with a handful of frames each
void write_clean_tree(const fs::path& root, int per_source, int w = 96, int h = 96) {
    std::uint64_t seed = 1;
    for (const char* source : {"alpha", "beta", "gamma"}) {
        fs::create_directories(root / source);
        for (int i = 0; i < per_source; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "frame_%03d.png", i);
            write_png(testutil::gradient_image(w, h, seed++), root / source / name);
        }
    }
}

SplitPlan three_way_plan() {
    return SplitPlan::from_json(
        nlohmann::json{{"A", {"alpha"}}, {"B", {"beta"}}, {"C", {"gamma"}}});
}

}  // namespace

TEST_CASE("split plan rejects duplicate assignment") {
    CHECK_THROWS(SplitPlan::from_json(nlohmann::json{{"A", {"x"}}, {"B", {"x"}}}));
    CHECK_THROWS(SplitPlan::from_json(nlohmann::json{{"A", nlohmann::json::array()}}));
    const SplitPlan plan = three_way_plan();
    CHECK(plan.split_of("alpha") == 'A');
    CHECK_THROWS(plan.split_of("unknown"));
}

TEST_CASE("corpus build writes a consistent manifest and is reproducible") {
    testutil::TempDir tmp("corpus");
    const fs::path clean = tmp.path() / "clean";
    write_clean_tree(clean, 4);

    BuildCorpusOptions opts;
    opts.clean_dir = clean;
    opts.out_dir = tmp.path() / "corpus1";
    opts.seed = 42;
    opts.per_artifact = 2;
    opts.normals = 9;
    opts.plan = three_way_plan();

    const CorpusManifest manifest = build_corpus(opts);
    CHECK(manifest.records.size() == 9 + 11u * 2);  // 11 kinds after the dotted split

    int corrupted = 0;
    for (const ManifestRecord& r : manifest.records) {
        CHECK(r.corrupted == r.kind.has_value());
        CHECK(r.corrupted == r.spec.has_value());
        CHECK(fs::exists(opts.out_dir / r.path));
        CHECK(r.split == opts.plan.split_of(r.source));
        if (r.corrupted) ++corrupted;
    }
    CHECK(corrupted == 22);

    // rebuild: byte-identical manifest and images
    BuildCorpusOptions opts2 = opts;
    opts2.out_dir = tmp.path() / "corpus2";
    build_corpus(opts2);
    CHECK(slurp(opts.out_dir / "manifest.json") == slurp(opts2.out_dir / "manifest.json"));
    for (const ManifestRecord& r : manifest.records) {
        CHECK(slurp(opts.out_dir / r.path) == slurp(opts2.out_dir / r.path));
    }

    // out_dir collision without force
    CHECK_THROWS(build_corpus(opts));
    opts.force = true;
    CHECK_NOTHROW(build_corpus(opts));
}

TEST_CASE("corpus build validates inputs") {
    testutil::TempDir tmp("corpus_bad");
    BuildCorpusOptions opts;
    opts.clean_dir = tmp.path() / "missing";
    opts.out_dir = tmp.path() / "out";
    opts.plan = three_way_plan();
    CHECK_THROWS(build_corpus(opts));

    // empty source dir
    fs::create_directories(tmp.path() / "clean2" / "alpha");
    opts.clean_dir = tmp.path() / "clean2";
    CHECK_THROWS(build_corpus(opts));

    // source not covered by the plan
    testutil::TempDir tmp2("corpus_bad2");
    write_clean_tree(tmp2.path() / "clean", 2);
    BuildCorpusOptions opts2;
    opts2.clean_dir = tmp2.path() / "clean";
    opts2.out_dir = tmp2.path() / "out";
    opts2.plan = SplitPlan::from_json(nlohmann::json{{"A", {"alpha", "beta"}}});
    CHECK_THROWS(build_corpus(opts2));
}

TEST_CASE("manifest json round trip is byte identical") {
    testutil::TempDir tmp("manifest_rt");
    const fs::path clean = tmp.path() / "clean";
    write_clean_tree(clean, 3);
    BuildCorpusOptions opts;
    opts.clean_dir = clean;
    opts.out_dir = tmp.path() / "corpus";
    opts.seed = 7;
    opts.per_artifact = 1;
    opts.normals = 6;
    opts.plan = three_way_plan();
    build_corpus(opts);

    const fs::path mpath = opts.out_dir / "manifest.json";
    const CorpusManifest manifest = CorpusManifest::load(mpath);
    manifest.save(tmp.path() / "again.json");
    CHECK(slurp(mpath) == slurp(tmp.path() / "again.json"));
}

TEST_CASE("manifest split violations are detected") {
    CorpusManifest manifest;
    manifest.records.push_back({"a.png", false, std::nullopt, "alpha", 'A', std::nullopt});
    manifest.records.push_back({"b.png", false, std::nullopt, "alpha", 'B', std::nullopt});
    CHECK_THROWS_AS(manifest.source_splits(), std::invalid_argument);
}

TEST_CASE("manifest label/kind consistency is enforced on load") {
    nlohmann::json j{{"version", 1},
                     {"corpus_seed", 0},
                     {"records",
                      {{{"path", "x.png"},
                        {"label", "corrupted"},
                        {"source", "s"},
                        {"split", "A"}}}}};  // corrupted but no kind/spec
    CHECK_THROWS(CorpusManifest::from_json(j));
}

TEST_CASE("train, bundle round trip, eval, and reproducibility on a tiny corpus") {
    testutil::TempDir tmp("train");
    const fs::path clean = tmp.path() / "clean";
    write_clean_tree(clean, 24);

    BuildCorpusOptions opts;
    opts.clean_dir = clean;
    opts.out_dir = tmp.path() / "corpus";
    opts.seed = 11;
    // sized so every specialist pool keeps two samples per class in each
    // half of its 50/50 split (the LDA row needs that many)
    opts.per_artifact = 12;
    opts.normals = 120;
    opts.plan = three_way_plan();
    const CorpusManifest manifest = build_corpus(opts);

    setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    ModelBundle bundle = train_from_manifest(manifest, opts.out_dir, 99);
    bundle.manifest_digest = file_digest(opts.out_dir / "manifest.json");
    CHECK(bundle.ensemble.specialists.size() == 10);

    const fs::path bpath = tmp.path() / "bundle.json";
    bundle.save(bpath);
    const ModelBundle loaded = ModelBundle::load(bpath);
    loaded.save(tmp.path() / "bundle2.json");
    CHECK(slurp(bpath) == slurp(tmp.path() / "bundle2.json"));

    const EvalReport r1 = evaluate_manifest_split(loaded, manifest, opts.out_dir, 'C');
    const EvalReport r2 = evaluate_manifest_split(bundle, manifest, opts.out_dir, 'C');
    CHECK(r1.to_json() == r2.to_json());
    CHECK(r1.tp + r1.fp + r1.tn + r1.fn > 0);

    // second full training run is identical
    ModelBundle bundle_b = train_from_manifest(manifest, opts.out_dir, 99);
    bundle_b.manifest_digest = bundle.manifest_digest;
    CHECK(bundle_b.to_json() == bundle.to_json());
    unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("training rejects a manifest whose sources straddle splits") {
    testutil::TempDir tmp("train_bad");
    const fs::path clean = tmp.path() / "clean";
    write_clean_tree(clean, 3);
    BuildCorpusOptions opts;
    opts.clean_dir = clean;
    opts.out_dir = tmp.path() / "corpus";
    opts.seed = 3;
    opts.per_artifact = 1;
    opts.normals = 6;
    opts.plan = three_way_plan();
    CorpusManifest manifest = build_corpus(opts);
    manifest.records.front().split = manifest.records.front().split == 'A' ? 'B' : 'A';
    CHECK_THROWS(train_from_manifest(manifest, opts.out_dir, 1));
}

TEST_CASE("file digest is stable and content sensitive") {
    testutil::TempDir tmp("digest");
    const fs::path f1 = tmp.path() / "one.txt";
    std::ofstream(f1) << "hello";
    const fs::path f2 = tmp.path() / "two.txt";
    std::ofstream(f2) << "hellp";
    CHECK(file_digest(f1) == file_digest(f1));
    CHECK(file_digest(f1) != file_digest(f2));
    CHECK(file_digest(f1).rfind("fnv1a64:", 0) == 0);
}
