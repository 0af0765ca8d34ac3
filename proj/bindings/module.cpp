// python bindings: numpy arrays in, numpy arrays / plain dicts out.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <optional>

#include "glitchkit/dataset.hpp"
#include "glitchkit/png_io.hpp"

namespace py = pybind11;
using namespace glitchkit;

namespace {

Image image_from_array(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 3 || arr.shape(2) != 3) {
        throw std::invalid_argument("expected an (H, W, 3) uint8 array");
    }
    const int h = static_cast<int>(arr.shape(0));
    const int w = static_cast<int>(arr.shape(1));
    std::vector<Rgb> pixels(static_cast<std::size_t>(w) * h);
    std::memcpy(pixels.data(), arr.data(), pixels.size() * sizeof(Rgb));
    return Image(w, h, std::move(pixels));
}

py::array_t<std::uint8_t> image_to_array(const Image& img) {
    py::array_t<std::uint8_t> arr({img.height(), img.width(), 3});
    std::memcpy(arr.mutable_data(), img.data().data(), img.data().size() * sizeof(Rgb));
    return arr;
}

GrayImage gray_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("expected an (H, W) float array");
    const int h = static_cast<int>(arr.shape(0));
    const int w = static_cast<int>(arr.shape(1));
    std::vector<double> data(arr.data(), arr.data() + static_cast<std::size_t>(w) * h);
    return GrayImage(w, h, std::move(data));
}

py::array_t<double> gray_to_array(const GrayImage& img) {
    py::array_t<double> arr({img.height(), img.width()});
    std::memcpy(arr.mutable_data(), img.data().data(), img.data().size() * sizeof(double));
    return arr;
}

std::vector<FeatureVector> features_from_array(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("expected an (n, d) float array");
    std::vector<FeatureVector> out(static_cast<std::size_t>(arr.shape(0)));
    for (py::ssize_t i = 0; i < arr.shape(0); ++i) {
        out[i].values.assign(arr.data() + i * arr.shape(1), arr.data() + (i + 1) * arr.shape(1));
    }
    return out;
}

py::dict json_to_dict(const nlohmann::json& j) {
    const py::module_ json_mod = py::module_::import("json");
    return json_mod.attr("loads")(j.dump());
}

nlohmann::json dict_to_json(const py::object& obj) {
    const py::module_ json_mod = py::module_::import("json");
    const std::string dumped = json_mod.attr("dumps")(obj).cast<std::string>();
    return nlohmann::json::parse(dumped);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "gaming-artifact synthesis and detection core";

    // --- image basics -----------------------------------------------------
    m.def("read_png", [](const std::filesystem::path& p) { return image_to_array(read_png(p)); },
          py::arg("path"));
    m.def("write_png",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& img,
             const std::filesystem::path& p) { write_png(image_from_array(img), p); },
          py::arg("image"), py::arg("path"));
    m.def("to_gray",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& img) {
              return gray_to_array(to_gray(image_from_array(img)));
          },
          py::arg("image"));
    m.def("resize",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& img,
             int w, int h) { return image_to_array(resize(image_from_array(img), w, h)); },
          py::arg("image"), py::arg("width"), py::arg("height"));
    m.def("resize_gray",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img, int w,
             int h) { return gray_to_array(resize(gray_from_array(img), w, h)); },
          py::arg("image"), py::arg("width"), py::arg("height"));

    // --- corruption generators ---------------------------------------------
    m.def("artifact_kinds", [] {
        std::vector<std::string> names;
        for (ArtifactKind kind : kAllArtifactKinds) names.push_back(to_string(kind));
        return names;
    });
    m.def("apply_glitch",
          [](const std::string& kind,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& img,
             std::uint64_t seed, const py::object& aux) {
              const Image image = image_from_array(img);
              std::optional<Image> aux_img;
              if (!aux.is_none()) {
                  aux_img = image_from_array(
                      aux.cast<py::array_t<std::uint8_t,
                                           py::array::c_style | py::array::forcecast>>());
              }
              Rng rng(seed);
              const GlitchResult result = apply(artifact_kind_from_string(kind), image,
                                                aux_img ? &*aux_img : nullptr, rng);
              return py::make_tuple(image_to_array(result.first),
                                    json_to_dict(result.second.to_json()));
          },
          py::arg("kind"), py::arg("image"), py::arg("seed"), py::arg("aux") = py::none());
    m.def("replay_glitch",
          [](const py::object& spec,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& img,
             const py::object& aux) {
              std::optional<Image> aux_img;
              if (!aux.is_none()) {
                  aux_img = image_from_array(
                      aux.cast<py::array_t<std::uint8_t,
                                           py::array::c_style | py::array::forcecast>>());
              }
              const Image out = replay(GlitchSpec::from_json(dict_to_json(spec)),
                                       image_from_array(img), aux_img ? &*aux_img : nullptr);
              return image_to_array(out);
          },
          py::arg("spec"), py::arg("image"), py::arg("aux") = py::none());

    // --- features -----------------------------------------------------------
    m.def("dft2",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& gray) {
              const Spectrum spec = dft2(gray_from_array(gray));
              GrayImage mag(spec.width, spec.height, spec.magnitudes);
              GrayImage ph(spec.width, spec.height, spec.phases);
              return py::make_tuple(gray_to_array(mag), gray_to_array(ph));
          },
          py::arg("gray"), "unitary DC-centered 2D DFT -> (magnitudes, phases)");
    m.def("idft2",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& mag,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& ph) {
              Spectrum spec;
              spec.height = static_cast<int>(mag.shape(0));
              spec.width = static_cast<int>(mag.shape(1));
              spec.magnitudes.assign(mag.data(), mag.data() + mag.size());
              spec.phases.assign(ph.data(), ph.data() + ph.size());
              return gray_to_array(idft2(spec));
          },
          py::arg("magnitudes"), py::arg("phases"));
    m.def("spectral_feature",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& img,
             int side) {
              const FeatureVector fv = spectral_feature(image_from_array(img), side);
              return py::array_t<double>(py::ssize_t(fv.values.size()), fv.values.data());
          },
          py::arg("image"), py::arg("side") = 64);
    m.def("hog",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& gray,
             int patch, int bins) {
              HogConfig cfg;
              cfg.patch = patch;
              cfg.bins = bins;
              const HogDescriptor desc = hog(gray_from_array(gray), cfg);
              return py::array_t<double>(py::ssize_t(desc.values.size()), desc.values.data());
          },
          py::arg("gray"), py::arg("patch") = 16, py::arg("bins") = 9);
    m.def("anomaly_map",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& img) {
              const AnomalyMap map = anomaly_map(image_from_array(img));
              return gray_to_array(GrayImage(map.width, map.height, map.scores));
          },
          py::arg("image"));
    m.def("dilate",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
             int radius) {
              AnomalyMap map;
              map.height = static_cast<int>(scores.shape(0));
              map.width = static_cast<int>(scores.shape(1));
              map.scores.assign(scores.data(), scores.data() + scores.size());
              const AnomalyMap out = dilate(map, radius);
              return gray_to_array(GrayImage(out.width, out.height, out.scores));
          },
          py::arg("scores"), py::arg("radius") = 2);

    // --- pca ------------------------------------------------------------------
    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("k", &PcaModel::k)
        .def_readonly("singular_values", &PcaModel::singular_values)
        .def("transform",
             [](const PcaModel& model,
                const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
                 FeatureVector fv;
                 fv.values.assign(v.data(), v.data() + v.size());
                 const FeatureVector out = pca_transform(model, fv);
                 return py::array_t<double>(py::ssize_t(out.values.size()), out.values.data());
             },
             py::arg("vector"));
    m.def("pca_fit",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& data, int k,
             int oversample, int power_iters, std::uint64_t seed) {
              PcaConfig cfg;
              cfg.oversample = oversample;
              cfg.power_iters = power_iters;
              cfg.seed = seed;
              return pca_fit(features_from_array(data), k, cfg);
          },
          py::arg("data"), py::arg("k"), py::arg("oversample") = 10, py::arg("power_iters") = 2,
          py::arg("seed") = 0);

    // --- learners ---------------------------------------------------------------
    py::class_<TrainedModel>(m, "TrainedModel")
        .def("predict_proba",
             [](const TrainedModel& model,
                const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
                 FeatureVector fv;
                 fv.values.assign(v.data(), v.data() + v.size());
                 return predict_proba(model, fv);
             },
             py::arg("vector"))
        .def("to_json", [](const TrainedModel& model) { return json_to_dict(model_to_json(model)); })
        .def_static("from_json",
                    [](const py::object& j) { return model_from_json(dict_to_json(j)); });
    m.def("train_lr",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
             const std::vector<int>& y, double c) {
              LrConfig cfg;
              cfg.c = c;
              return lr_train(features_from_array(x), y, cfg);
          },
          py::arg("x"), py::arg("y"), py::arg("c") = 1.0);
    m.def("train_lda",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
             const std::vector<int>& y) { return lda_train(features_from_array(x), y); },
          py::arg("x"), py::arg("y"));
    m.def("train_svc",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
             const std::vector<int>& y, double c, const py::object& gamma) {
              SvcConfig cfg;
              cfg.c = c;
              if (!gamma.is_none()) cfg.gamma = gamma.cast<double>();
              return svc_train(features_from_array(x), y, cfg);
          },
          py::arg("x"), py::arg("y"), py::arg("c") = 1.0, py::arg("gamma") = py::none());
    m.def("train_threshold",
          [](const std::vector<double>& scores, const std::vector<int>& y) {
              return threshold_train(scores, y);
          },
          py::arg("scores"), py::arg("y"));

    // --- corpus / training / evaluation pipeline -----------------------------
    m.def("build_corpus",
          [](const std::filesystem::path& clean_dir, const std::filesystem::path& out_dir,
             std::uint64_t seed, int per_artifact, int normals, const py::object& plan,
             bool force) {
              BuildCorpusOptions opts;
              opts.clean_dir = clean_dir;
              opts.out_dir = out_dir;
              opts.seed = seed;
              opts.per_artifact = per_artifact;
              opts.normals = normals;
              opts.plan = SplitPlan::from_json(dict_to_json(plan));
              opts.force = force;
              return json_to_dict(build_corpus(opts).to_json());
          },
          py::arg("clean_dir"), py::arg("out_dir"), py::arg("seed"), py::arg("per_artifact"),
          py::arg("normals"), py::arg("plan"), py::arg("force") = false);
    m.def("train",
          [](const std::filesystem::path& manifest_path, const std::filesystem::path& out_path,
             std::uint64_t seed) {
              const CorpusManifest manifest = CorpusManifest::load(manifest_path);
              ModelBundle bundle =
                  train_from_manifest(manifest, manifest_path.parent_path(), seed);
              bundle.manifest_digest = file_digest(manifest_path);
              bundle.save(out_path);
              nlohmann::json held_in = nlohmann::json::object();
              for (const SpecialistModel& sp : bundle.ensemble.specialists) {
                  held_in[to_string(sp.spec.artifact)] = sp.held_in.accuracy;
              }
              return json_to_dict(nlohmann::json{
                  {"specialist_held_in_accuracy", held_in},
                  {"ensemble_held_in", bundle.ensemble.held_in.to_json()}});
          },
          py::arg("manifest"), py::arg("out"), py::arg("seed"));
    m.def("evaluate",
          [](const std::filesystem::path& bundle_path, const std::filesystem::path& manifest_path,
             const std::string& split) {
              if (split.size() != 1) throw std::invalid_argument("split must be A, B, or C");
              const ModelBundle bundle = ModelBundle::load(bundle_path);
              const CorpusManifest manifest = CorpusManifest::load(manifest_path);
              return json_to_dict(
                  evaluate_manifest_split(bundle, manifest, manifest_path.parent_path(), split[0])
                      .to_json());
          },
          py::arg("bundle"), py::arg("manifest"), py::arg("split") = "C");
    m.def("predict",
          [](const std::filesystem::path& bundle_path,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& img) {
              const ModelBundle bundle = ModelBundle::load(bundle_path);
              const Prediction pred = predict(bundle.ensemble, image_from_array(img));
              nlohmann::json scores = nlohmann::json::object();
              for (int i = 0; i < kNumGroups; ++i) {
                  scores[to_string(kAllGroups[i])] = pred.specialist_scores[i];
              }
              return json_to_dict(nlohmann::json{
                  {"decision", pred.corrupted ? "corrupted" : "normal"},
                  {"probability", pred.probability},
                  {"specialist_scores", scores}});
          },
          py::arg("bundle"), py::arg("image"));

    m.attr("__version__") = "0.1.0";
}
