// SPDX-License-Identifier: Apache-2.0
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kseq/pipeline.hpp"
#include "kseq/synth.hpp"

namespace py = pybind11;
using namespace kseq;
using nlohmann::json;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

template <typename T>
py::array_t<std::uint8_t> to_numpy(const Grid<T>& g) {
  py::array_t<std::uint8_t> out({g.rows(), g.cols()});
  auto view = out.mutable_unchecked<2>();
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) view(r, c) = static_cast<std::uint8_t>(g(r, c));
  }
  return out;
}

template <typename T>
Grid<T> from_numpy(const U8Array& a) {
  if (a.ndim() != 2) throw Error("py.bad_array", "expected a 2-D array");
  const auto view = a.unchecked<2>();
  Grid<T> g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) g(r, c) = static_cast<T>(view(r, c));
  }
  return g;
}

ChromosomeImage image_from(const U8Array& pixels, const std::optional<U8Array>& mask, std::optional<int> label) {
  auto px = from_numpy<std::uint8_t>(pixels);
  Mask m = mask ? from_numpy<std::uint8_t>(*mask) : threshold_mask(px);
  for (auto& v : m.data()) v = v ? 1 : 0;
  return make_chromosome(std::move(px), std::move(m), label, "py", "py");
}

PipelineConfig config_from(const std::string& text) {
  return text.empty() ? PipelineConfig{} : config_from_json(json::parse(text));
}

py::dict synth_dict(const SynthChromosome& s) {
  py::dict d;
  d["pixels"] = to_numpy(s.image.pixels);
  d["mask"] = to_numpy(s.image.mask);
  d["bands"] = s.truth.band_levels;
  d["base_class"] = s.truth.base_class;
  py::list tips;
  for (const auto& t : s.truth.tips) tips.append(py::make_tuple(t.row, t.col));
  d["tips"] = tips;
  d["mutation"] = s.truth.mutation ? py::object(py::str(to_json(*s.truth.mutation).dump())) : py::none();
  return d;
}

Mutation mutation_from(const std::string& kind, int site, int span, std::optional<int> level, double fraction) {
  Mutation m;
  if (kind == "band_insertion") m.kind = MutationKind::band_insertion;
  else if (kind == "band_deletion") m.kind = MutationKind::band_deletion;
  else if (kind == "band_inversion") m.kind = MutationKind::band_inversion;
  else throw Error("synth.bad_mutation", "unknown mutation kind '" + kind + "'");
  m.site = site;
  m.span = span;
  if (level) m.payload = Band{palette_intensity(*level), fraction};
  return m;
}

py::list script_list(const std::vector<EditStep>& script) {
  py::list out;
  for (const auto& s : script) out.append(py::make_tuple(to_string(s.op), s.index, s.token));
  return out;
}

}  // namespace

PYBIND11_MODULE(_kseq, m) {
  m.doc() = "Chromosome sub-structure tokenization and analysis";
  m.attr("__version__") = kToolVersion;
  m.attr("SOC") = kSoc;
  m.attr("EOC") = kEoc;

  static py::exception<Error> error_type(m, "KseqError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error_type.ptr(), py::make_tuple(e.code(), e.what()).ptr());
    }
  });

  m.def(
      "generate_chromosome",
      [](int class_label, std::uint64_t seed, double sigma, double jitter, double bend_prob,
         std::optional<std::string> mutation, int site, int span, std::optional<int> level, double fraction) {
        if (class_label < 0 || class_label >= kNumClasses) throw Error("synth.bad_program", "class label out of range");
        auto program = standard_programs()[static_cast<std::size_t>(class_label)];
        if (mutation) program = mutate(program, mutation_from(*mutation, site, span, level, fraction));
        return synth_dict(generate_chromosome(program, seed, {sigma, jitter, bend_prob}));
      },
      py::arg("class_label"), py::arg("seed") = 0, py::arg("sigma") = 0.0, py::arg("jitter") = 0.0,
      py::arg("bend_prob") = 0.0, py::arg("mutation") = py::none(), py::arg("site") = 0, py::arg("span") = 1,
      py::arg("level") = py::none(), py::arg("fraction") = 0.2);

  m.def("class_bands", [](int class_label) {
    if (class_label < 0 || class_label >= kNumClasses) throw Error("synth.bad_program", "class label out of range");
    return standard_programs()[static_cast<std::size_t>(class_label)].levels();
  });

  m.def(
      "generate_dataset",
      [](const std::filesystem::path& out, int male, int female, std::uint64_t seed, double abnormal_fraction,
         double sigma, double jitter, double bend_prob, const std::string& format) {
        DatasetSpec spec{male, female, seed, {sigma, jitter, bend_prob}, abnormal_fraction};
        const auto data = generate_dataset(spec);
        PipelineConfig cfg;
        cfg.seed = seed;
        return write_dataset(data, out, format == "pgm" ? RasterFormat::pgm : RasterFormat::png, stamp(cfg));
      },
      py::arg("out"), py::arg("male") = 32, py::arg("female") = 33, py::arg("seed") = 7,
      py::arg("abnormal_fraction") = 0.0, py::arg("sigma") = 8.0, py::arg("jitter") = 0.1,
      py::arg("bend_prob") = 0.2, py::arg("format") = "png");

  m.def(
      "longitudinal_axis",
      [](const U8Array& mask) {
        auto mk = from_numpy<std::uint8_t>(mask);
        for (auto& v : mk.data()) v = v ? 1 : 0;
        const auto axis = longitudinal_axis(mk);
        std::vector<std::pair<int, int>> pts;
        for (const auto& p : axis.points) pts.emplace_back(p.row, p.col);
        return py::make_tuple(pts, axis.arclengths);
      },
      py::arg("mask"));

  m.def(
      "fit_vocabulary",
      [](const std::filesystem::path& manifest, const std::string& config) {
        const auto cfg = config_from(config);
        const auto images = load_images(read_manifest(manifest));
        std::vector<const ChromosomeImage*> ptrs;
        for (const auto& i : images) ptrs.push_back(&i);
        py::gil_scoped_release release;
        return model_to_json(fit_vocabulary(ptrs, cfg)).dump();
      },
      py::arg("manifest"), py::arg("config") = "");

  m.def(
      "tokenize",
      [](const U8Array& pixels, std::optional<U8Array> mask, const std::string& model, const std::string& config) {
        const auto cfg = config_from(config);
        const auto img = image_from(pixels, mask, std::nullopt);
        const auto seq = tokenize(img, model_from_json(json::parse(model)), cfg.tokenizer());
        return py::make_tuple(seq.interior_vec(), seq.positions);
      },
      py::arg("pixels"), py::arg("mask") = py::none(), py::arg("model"), py::arg("config") = "");

  m.def(
      "run_experiment",
      [](const std::filesystem::path& manifest, const std::string& config) {
        const auto cfg = config_from(config);
        const auto images = load_images(read_manifest(manifest));
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(images, cfg);
        }
        json j{{"instances", r.instances},
               {"train", r.train_size},
               {"test", r.test_size},
               {"pattern_accuracy", r.pattern_accuracy},
               {"linear_accuracy", r.linear_accuracy},
               {"model", model_to_json(r.model)},
               {"bank", bank_to_json(r.bank)},
               {"metrics_csv", metrics_csv(r, cfg)}};
        return j.dump();
      },
      py::arg("manifest"), py::arg("config") = "");

  m.def(
      "edit_distance",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        const auto r = edit_distance(a, b);
        return py::make_tuple(r.distance, script_list(r.script));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "classify",
      [](const std::vector<int>& interior, const std::string& bank) {
        const auto r = classify_by_pattern(make_sequence(interior), bank_from_json(json::parse(bank)));
        return py::make_tuple(r.label, r.distance);
      },
      py::arg("interior"), py::arg("bank"));

  m.def(
      "detect",
      [](const std::vector<int>& interior, const std::string& bank, int predicted_class, double threshold) {
        const auto r = detect_abnormal(make_sequence(interior), bank_from_json(json::parse(bank)), predicted_class,
                                       threshold);
        py::dict d;
        d["abnormal"] = r.verdict == Verdict::abnormal;
        d["score"] = r.score;
        d["canonical"] = r.canonical;
        d["edit_script"] = script_list(r.edit_script);
        return d;
      },
      py::arg("interior"), py::arg("bank"), py::arg("predicted_class"), py::arg("threshold") = 0.0);

  m.def(
      "fpgrowth",
      [](const std::vector<std::vector<int>>& tx, double min_support) {
        std::vector<std::pair<std::vector<int>, double>> out;
        for (const auto& s : fpgrowth(tx, min_support)) out.emplace_back(s.items, s.support);
        return out;
      },
      py::arg("transactions"), py::arg("min_support"));

  m.def(
      "mine_subsequences",
      [](const std::vector<std::vector<int>>& seqs, double min_support, int max_len) {
        std::vector<std::pair<std::vector<int>, double>> out;
        for (const auto& p : mine_subsequences(seqs, min_support, max_len)) out.emplace_back(p.pattern, p.support);
        return out;
      },
      py::arg("sequences"), py::arg("min_support"), py::arg("max_len") = kDefaultPatternMaxLen);

  m.def(
      "pareto_front",
      [](const std::vector<std::pair<double, double>>& points) {
        std::vector<SweepPoint> pts;
        for (std::size_t i = 0; i < points.size(); ++i) {
          SweepPoint p;
          p.fnr = points[i].first;
          p.fpr = points[i].second;
          p.params.threshold = static_cast<double>(i);
          pts.push_back(p);
        }
        std::vector<std::size_t> idx;
        for (const auto& p : pareto_front(pts)) idx.push_back(static_cast<std::size_t>(p.params.threshold));
        return idx;
      },
      py::arg("points"), "Indices of the non-dominated (fnr, fpr) points, sorted by fnr then fpr.");

  m.def(
      "positional_encoding", [](double pos, int d_pe) { return positional_encoding(pos, d_pe); }, py::arg("pos"),
      py::arg("d_pe"));
}
