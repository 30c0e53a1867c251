// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kseq/error.hpp"
#include "kseq/morphology.hpp"
#include "kseq/pipeline.hpp"
#include "kseq/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kseq;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::optional<int> patch_size, K, K_over, min_run, d_pe, ngram_order, pattern_max_len, epochs, max_iters,
      max_sweeps;
  std::optional<double> fg_min, lambda, alpha, threshold, min_support, learning_rate, l2;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ratio, embeddings;
};

void add_config_flags(CLI::App* sub, ConfigFlags& f) {
  sub->add_option("--config", f.config_path, "JSON config file; flags take precedence");
  sub->add_option("--patch-size", f.patch_size);
  sub->add_option("--fg-min", f.fg_min);
  sub->add_option("--K", f.K, "Token vocabulary size");
  sub->add_option("--K-over", f.K_over, "Overcluster count before merging");
  sub->add_option("--max-iters", f.max_iters);
  sub->add_option("--lambda", f.lambda, "Smoothing weight");
  sub->add_option("--max-sweeps", f.max_sweeps);
  sub->add_option("--min-run", f.min_run);
  sub->add_option("--d-pe", f.d_pe, "Positional encoding width");
  sub->add_option("--ngram-order", f.ngram_order);
  sub->add_option("--alpha", f.alpha, "n-gram Laplace constant");
  sub->add_option("--min-support", f.min_support);
  sub->add_option("--pattern-max-len", f.pattern_max_len);
  sub->add_option("--threshold", f.threshold, "Edit-distance threshold for abnormality");
  sub->add_option("--learning-rate", f.learning_rate);
  sub->add_option("--l2", f.l2);
  sub->add_option("--epochs", f.epochs);
  sub->add_option("--seed", f.seed);
  sub->add_option("--ratio", f.ratio, "Train:test ratio, e.g. 90:10");
  sub->add_option("--embeddings", f.embeddings, "Directory of <instance_id>.ksemb patch embeddings");
}

std::pair<int, int> parse_ratio(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error("cli.bad_ratio", "ratio must look like 90:10");
  }
}

PipelineConfig resolve(const ConfigFlags& f) {
  json j = json::object();
  if (!f.config_path.empty()) j = load_json(f.config_path);
  auto set = [&](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  set("patch_size", f.patch_size);
  set("fg_min", f.fg_min);
  set("K", f.K);
  set("K_over", f.K_over);
  set("max_iters", f.max_iters);
  set("lambda", f.lambda);
  set("max_sweeps", f.max_sweeps);
  set("min_run", f.min_run);
  set("d_pe", f.d_pe);
  set("ngram_order", f.ngram_order);
  set("ngram_alpha", f.alpha);
  set("min_support", f.min_support);
  set("pattern_max_len", f.pattern_max_len);
  set("threshold", f.threshold);
  set("seed", f.seed);
  set("embeddings_dir", f.embeddings);
  if (f.ratio) {
    const auto r = parse_ratio(*f.ratio);
    j["split_ratio"] = {r.first, r.second};
  }
  if (f.learning_rate) j["linear"]["learning_rate"] = *f.learning_rate;
  if (f.l2) j["linear"]["l2"] = *f.l2;
  if (f.epochs) j["linear"]["epochs"] = *f.epochs;
  return config_from_json(j);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io.unwritable", "cannot write " + path.string());
  out << text;
}

json stamped(json j, const PipelineConfig& cfg) {
  json out{{"version", kFormatVersion}, {"stamp", stamp(cfg)}};
  for (auto& [k, v] : j.items()) {
    if (k != "version") out[k] = std::move(v);
  }
  return out;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(1) << '\n';
  } else {
    save_json(out, j);
  }
}

// Images of a manifest, optionally restricted to one side of a saved split.
struct Selection {
  std::string manifest;
  std::string split;
  std::string subset = "all";
};

void add_selection(CLI::App* sub, Selection& s, const std::string& default_subset) {
  s.subset = default_subset;
  sub->add_option("--manifest", s.manifest, "Dataset manifest JSON")->required();
  sub->add_option("--split", s.split, "Split JSON written by `split`");
  sub->add_option("--subset", s.subset, "all, train or test (needs --split)")
      ->check(CLI::IsMember({"all", "train", "test"}));
}

std::vector<ChromosomeImage> load_selection(const Selection& s) {
  auto entries = read_manifest(s.manifest);
  if (!s.split.empty() && s.subset != "all") {
    const auto doc = load_json(s.split);
    if (!doc.contains(s.subset)) throw Error("cli.bad_split", "split file has no '" + s.subset + "' list");
    const auto ids = doc.at(s.subset).get<std::set<std::string>>();
    std::erase_if(entries, [&](const ManifestEntry& e) { return !ids.count(e.instance_id); });
  } else if (s.subset != "all") {
    throw Error("cli.missing_split", "--subset " + s.subset + " needs --split");
  }
  return load_images(entries);
}

std::vector<const ChromosomeImage*> pointers(const std::vector<ChromosomeImage>& images) {
  std::vector<const ChromosomeImage*> out;
  for (const auto& i : images) out.push_back(&i);
  return out;
}

json edit_script_json(const std::vector<EditStep>& script) {
  json out = json::array();
  for (const auto& s : script) out.push_back({{"op", to_string(s.op)}, {"index", s.index}, {"token", s.token}});
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(part == "inf" ? std::numeric_limits<double>::infinity() : std::stod(part));
    } catch (const std::exception&) {
      throw Error("cli.bad_list", "bad number '" + part + "'");
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_doubles(s)) out.push_back(static_cast<int>(v));
  return out;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Chromosome tokenization, sequence mining and abnormality detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // gen -----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  DatasetSpec spec;
  std::string gen_out, gen_format = "png";
  gen->add_option("--male", spec.cases_male)->capture_default_str();
  gen->add_option("--female", spec.cases_female)->capture_default_str();
  gen->add_option("--seed", spec.seed)->capture_default_str();
  gen->add_option("--abnormal-fraction", spec.abnormal_fraction)->capture_default_str();
  gen->add_option("--sigma", spec.noise.intensity_sigma, "Intensity noise")->capture_default_str();
  gen->add_option("--jitter", spec.noise.length_jitter, "Relative band length jitter")->capture_default_str();
  gen->add_option("--bend-prob", spec.noise.bend_prob)->capture_default_str();
  gen->add_option("--format", gen_format)->check(CLI::IsMember({"png", "pgm"}))->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->callback([&] {
    const json gen_cfg{{"male", spec.cases_male},
                       {"female", spec.cases_female},
                       {"abnormal_fraction", spec.abnormal_fraction},
                       {"sigma", spec.noise.intensity_sigma},
                       {"jitter", spec.noise.length_jitter},
                       {"bend_prob", spec.noise.bend_prob}};
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(gen_cfg.dump())));
    const json st{{"tool_version", kToolVersion}, {"config_hash", hash}, {"seed", spec.seed}};
    const auto data = generate_dataset(spec);
    const auto manifest = write_dataset(data, gen_out, gen_format == "pgm" ? RasterFormat::pgm : RasterFormat::png,
                                        {{"stamp", st}});
    std::size_t abnormal = 0;
    for (const auto& i : data.instances) abnormal += i.truth.mutation.has_value();
    std::cout << json{{"manifest", manifest.string()},
                      {"cases", data.cases.size()},
                      {"instances", data.instances.size()},
                      {"abnormal", abnormal},
                      {"stamp", st}}
                     .dump(1)
              << '\n';
  });

  // split ---------------------------------------------------------------
  auto* split = app.add_subcommand("split", "Stratified train/test split");
  ConfigFlags split_flags;
  std::string split_manifest, split_out;
  add_config_flags(split, split_flags);
  split->add_option("--manifest", split_manifest)->required();
  split->add_option("--out", split_out, "Split JSON (stdout when omitted)");
  split->callback([&] {
    const auto cfg = resolve(split_flags);
    std::vector<std::pair<std::string, int>> labeled;
    for (const auto& e : read_manifest(split_manifest)) {
      if (!e.class_label) throw Error("chromo.missing_label", e.instance_id + " has no class label");
      labeled.emplace_back(e.instance_id, *e.class_label);
    }
    const auto s = stratified_split(labeled, cfg.split_ratio, cfg.stage_seed("split"));
    emit(stamped({{"ratio", {s.ratio.first, s.ratio.second}}, {"train", s.train_ids}, {"test", s.test_ids}}, cfg),
         split_out);
  });

  // fit -----------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "Fit the token vocabulary");
  ConfigFlags fit_flags;
  Selection fit_sel;
  std::string fit_out;
  add_config_flags(fit, fit_flags);
  add_selection(fit, fit_sel, "train");
  fit->add_option("--out", fit_out, "Cluster model JSON")->required();
  fit->callback([&] {
    const auto cfg = resolve(fit_flags);
    auto sel = fit_sel;
    if (sel.split.empty()) sel.subset = "all";
    const auto images = load_selection(sel);
    const auto model = fit_vocabulary(pointers(images), cfg);
    save_json(fit_out, stamped(model_to_json(model), cfg));
  });

  // tokenize ------------------------------------------------------------
  auto* tok = app.add_subcommand("tokenize", "Tokenize chromosomes into token sequences");
  ConfigFlags tok_flags;
  Selection tok_sel;
  std::string tok_model, tok_out, tok_export;
  add_config_flags(tok, tok_flags);
  add_selection(tok, tok_sel, "all");
  tok->add_option("--model", tok_model)->required();
  tok->add_option("--out", tok_out, "Token dump (stdout when omitted)");
  tok->add_option("--export-embeddings", tok_export, "Also write built-in patch features as .ksemb files");
  tok->callback([&] {
    const auto cfg = resolve(tok_flags);
    const auto images = load_selection(tok_sel);
    const auto model = model_from_json(load_json(tok_model));
    const auto ptrs = pointers(images);
    const auto result = tokenize_all(ptrs, model, cfg);
    std::vector<TokenSequence> seqs;
    for (const auto& t : result) seqs.push_back(t.sequence);
    const auto text = tokens_text(seqs, cfg);
    if (tok_out.empty()) std::cout << text;
    else write_text(tok_out, text);
    if (!tok_export.empty()) {
      fs::create_directories(tok_export);
      for (std::size_t i = 0; i < images.size(); ++i) {
        export_embeddings(fs::path(tok_export) / (images[i].instance_id + ".ksemb"), result[i].features);
      }
    }
  });

  // mine ----------------------------------------------------------------
  auto* mine = app.add_subcommand("mine", "Build the pattern bank and n-gram model from token dumps");
  ConfigFlags mine_flags;
  std::string mine_tokens, mine_manifest, mine_out, mine_ngram, mine_itemsets;
  add_config_flags(mine, mine_flags);
  mine->add_option("--tokens", mine_tokens, "Token dump")->required();
  mine->add_option("--manifest", mine_manifest, "Manifest supplying class labels")->required();
  mine->add_option("--out", mine_out, "Pattern bank JSON")->required();
  mine->add_option("--ngram-out", mine_ngram, "n-gram model JSON");
  mine->add_option("--itemsets-out", mine_itemsets, "Per-class FP-Growth itemsets JSON");
  mine->callback([&] {
    const auto cfg = resolve(mine_flags);
    std::map<std::string, int> labels;
    for (const auto& e : read_manifest(mine_manifest)) {
      if (e.class_label) labels[e.instance_id] = *e.class_label;
    }
    std::vector<std::pair<int, TokenList>> labeled;
    std::vector<TokenList> all;
    int vocab = cfg.K;
    for (const auto& s : read_tokens(mine_tokens)) {
      const auto it = labels.find(s.source);
      if (it == labels.end()) throw Error("cli.missing_label", s.source + " has no label in the manifest");
      labeled.emplace_back(it->second, s.interior_vec());
      all.push_back(s.interior_vec());
      for (int t : s.interior()) vocab = std::max(vocab, t + 1);
    }
    const auto bank = build_pattern_bank(labeled, cfg.min_support, cfg.pattern_max_len);
    save_json(mine_out, stamped(bank_to_json(bank), cfg));
    if (!mine_ngram.empty()) {
      save_json(mine_ngram, stamped(ngram_to_json(fit_ngram(all, cfg.ngram_order, cfg.ngram_alpha, vocab)), cfg));
    }
    if (!mine_itemsets.empty()) {
      std::map<int, std::vector<std::vector<int>>> per_class;
      for (const auto& [label, seq] : labeled) {
        std::set<int> items(seq.begin(), seq.end());
        per_class[label].emplace_back(items.begin(), items.end());
      }
      json classes = json::object();
      for (const auto& [label, tx] : per_class) {
        json rows = json::array();
        for (const auto& is : fpgrowth(tx, cfg.min_support)) rows.push_back({{"itemset", is.items}, {"support", is.support}});
        classes[std::to_string(label)] = rows;
      }
      save_json(mine_itemsets, stamped({{"min_support", cfg.min_support}, {"classes", classes}}, cfg));
    }
  });

  // train ---------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Train the linear head on pooled features");
  ConfigFlags train_flags;
  Selection train_sel;
  std::string train_model, train_out;
  add_config_flags(train, train_flags);
  add_selection(train, train_sel, "train");
  train->add_option("--model", train_model)->required();
  train->add_option("--out", train_out, "Linear model JSON")->required();
  train->callback([&] {
    const auto cfg = resolve(train_flags);
    auto sel = train_sel;
    if (sel.split.empty()) sel.subset = "all";
    const auto images = load_selection(sel);
    const auto model = model_from_json(load_json(train_model));
    const auto ptrs = pointers(images);
    auto hp = cfg.linear;
    hp.seed = cfg.stage_seed("linear");
    const auto clf = train_linear(pooled_dataset(tokenize_all(ptrs, model, cfg), ptrs, model, cfg), hp);
    save_json(train_out, stamped(linear_to_json(clf), cfg));
  });

  // classify ------------------------------------------------------------
  auto* classify = app.add_subcommand("classify", "Classify chromosomes by nearest pattern and linear head");
  ConfigFlags cls_flags;
  Selection cls_sel;
  std::string cls_model, cls_bank, cls_linear, cls_out;
  add_config_flags(classify, cls_flags);
  add_selection(classify, cls_sel, "test");
  classify->add_option("--model", cls_model)->required();
  classify->add_option("--bank", cls_bank)->required();
  classify->add_option("--linear", cls_linear, "Linear model JSON");
  classify->add_option("--out", cls_out, "Results JSON (stdout when omitted)");
  classify->callback([&] {
    const auto cfg = resolve(cls_flags);
    auto sel = cls_sel;
    if (sel.split.empty()) sel.subset = "all";
    const auto images = load_selection(sel);
    const auto model = model_from_json(load_json(cls_model));
    const auto bank = bank_from_json(load_json(cls_bank));
    std::optional<LinearClassifier> clf;
    if (!cls_linear.empty()) clf = linear_from_json(load_json(cls_linear));
    const auto ptrs = pointers(images);
    const auto toks = tokenize_all(ptrs, model, cfg);
    json results = json::array();
    std::size_t labeled = 0, pattern_hits = 0, linear_hits = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const auto m = classify_by_pattern(toks[i].sequence, bank);
      json r{{"instance_id", images[i].instance_id}, {"pattern", {{"label", m.label}, {"distance", m.distance}}}};
      int linear_label = -1;
      if (clf) {
        const auto x = pooled_features(toks[i].features, encode(toks[i].sequence, model, cfg.d_pe));
        linear_label = clf->predict(x);
        r["linear"] = linear_label;
      }
      if (images[i].class_label) {
        r["label"] = *images[i].class_label;
        ++labeled;
        pattern_hits += m.label == *images[i].class_label;
        linear_hits += linear_label == *images[i].class_label;
      }
      results.push_back(std::move(r));
    }
    json doc{{"instances", images.size()}, {"results", results}};
    if (labeled > 0) {
      doc["pattern_accuracy"] = safe_rate(pattern_hits, labeled);
      if (clf) doc["linear_accuracy"] = safe_rate(linear_hits, labeled);
    }
    emit(stamped(doc, cfg), cls_out);
  });

  // detect --------------------------------------------------------------
  auto* detect = app.add_subcommand("detect", "Flag structural abnormalities by divergence from class patterns");
  ConfigFlags det_flags;
  Selection det_sel;
  std::string det_model, det_bank, det_tokens, det_out;
  add_config_flags(detect, det_flags);
  detect->add_option("--manifest", det_sel.manifest, "Manifest (labels; images when --tokens is absent)");
  detect->add_option("--split", det_sel.split);
  detect->add_option("--subset", det_sel.subset)->check(CLI::IsMember({"all", "train", "test"}));
  detect->add_option("--tokens", det_tokens, "Token dump to score instead of tokenizing images");
  detect->add_option("--model", det_model, "Cluster model (when tokenizing images)");
  detect->add_option("--bank", det_bank)->required();
  detect->add_option("--out", det_out, "Results JSON (stdout when omitted)");
  detect->callback([&] {
    const auto cfg = resolve(det_flags);
    const auto bank = bank_from_json(load_json(det_bank));
    std::vector<TokenSequence> seqs;
    std::map<std::string, int> labels;
    if (!det_tokens.empty()) {
      seqs = read_tokens(det_tokens);
      if (!det_sel.manifest.empty()) {
        for (const auto& e : read_manifest(det_sel.manifest)) {
          if (e.class_label) labels[e.instance_id] = *e.class_label;
        }
      }
    } else {
      if (det_sel.manifest.empty() || det_model.empty()) {
        throw Error("cli.missing_input", "detect needs --tokens, or --manifest with --model");
      }
      const auto images = load_selection(det_sel);
      const auto model = model_from_json(load_json(det_model));
      for (auto& t : tokenize_all(pointers(images), model, cfg)) seqs.push_back(std::move(t.sequence));
      for (const auto& img : images) {
        if (img.class_label) labels[img.instance_id] = *img.class_label;
      }
    }
    json results = json::array();
    std::size_t flagged = 0;
    for (const auto& s : seqs) {
      const auto it = labels.find(s.source);
      const int predicted = it != labels.end() ? it->second : classify_by_pattern(s, bank).label;
      const auto d = detect_abnormal(s, bank, predicted, cfg.threshold);
      flagged += d.verdict == Verdict::abnormal;
      results.push_back({{"instance_id", s.source},
                         {"predicted_class", predicted},
                         {"verdict", d.verdict == Verdict::abnormal ? "abnormal" : "normal"},
                         {"score", d.score},
                         {"explanation",
                          {{"canonical", d.canonical},
                           {"observed", d.observed},
                           {"edit_script", edit_script_json(d.edit_script)}}}});
    }
    emit(stamped({{"threshold", cfg.threshold}, {"abnormal", flagged}, {"results", results}}, cfg), det_out);
  });

  // sweep ---------------------------------------------------------------
  auto* sw = app.add_subcommand("sweep", "FNR/FPR sweep and Pareto front");
  ConfigFlags sw_flags;
  std::string sw_manifest, sw_truth, sw_out, sw_plot, sw_thresholds = "0,1,2,3", sw_K, sw_lambda, sw_min_run;
  add_config_flags(sw, sw_flags);
  sw->add_option("--manifest", sw_manifest)->required();
  sw->add_option("--ground-truth", sw_truth, "Ground truth JSON (default: next to the manifest)");
  sw->add_option("--thresholds", sw_thresholds, "Comma-separated thresholds")->capture_default_str();
  sw->add_option("--K-list", sw_K, "Comma-separated K values");
  sw->add_option("--lambda-list", sw_lambda, "Comma-separated lambda values");
  sw->add_option("--min-run-list", sw_min_run, "Comma-separated min_run values");
  sw->add_option("--out", sw_out, "Sweep CSV (stdout when omitted)");
  sw->add_option("--plot", sw_plot, "SVG scatter with the Pareto front highlighted");
  sw->callback([&] {
    const auto cfg = resolve(sw_flags);
    const auto entries = read_manifest(sw_manifest);
    const fs::path truth_path = sw_truth.empty() ? fs::path(sw_manifest).parent_path() / "ground_truth.json"
                                                 : fs::path(sw_truth);
    const auto flags = abnormal_flags(load_json(truth_path));
    std::vector<char> abnormal;
    for (const auto& e : entries) {
      const auto it = flags.find(e.instance_id);
      if (it == flags.end()) throw Error("cli.missing_truth", e.instance_id + " missing from ground truth");
      abnormal.push_back(it->second ? 1 : 0);
    }
    const auto images = load_images(entries);
    SweepGrid grid;
    grid.thresholds = parse_doubles(sw_thresholds);
    if (!sw_K.empty()) grid.K = parse_int_list(sw_K);
    if (!sw_lambda.empty()) grid.lambda = parse_doubles(sw_lambda);
    if (!sw_min_run.empty()) grid.min_run = parse_int_list(sw_min_run);
    const auto points = run_sweep(images, abnormal, cfg, grid);
    const auto csv = sweep_csv(points, cfg);
    if (sw_out.empty()) std::cout << csv;
    else write_text(sw_out, csv);
    const auto front = pareto_front(points);
    if (!sw_plot.empty()) write_text(sw_plot, sweep_svg(points, front));
    if (!sw_out.empty()) {
      json f = json::array();
      for (const auto& p : front) f.push_back({{"params", p.params.describe()}, {"fnr", p.fnr}, {"fpr", p.fpr}});
      std::cout << json{{"points", points.size()}, {"pareto_front", f}}.dump(1) << '\n';
    }
  });

  // axis ----------------------------------------------------------------
  auto* axis = app.add_subcommand("axis", "Extract the longitudinal axis of one chromosome");
  ConfigFlags axis_flags;
  std::string axis_image, axis_mask, axis_png, axis_json;
  add_config_flags(axis, axis_flags);
  axis->add_option("--image", axis_image)->required();
  axis->add_option("--mask", axis_mask, "Mask raster (thresholded when omitted)");
  axis->add_option("--out-png", axis_png, "Overlay PNG");
  axis->add_option("--out-json", axis_json, "Polyline JSON (stdout when omitted)");
  axis->callback([&] {
    const auto cfg = resolve(axis_flags);
    std::optional<fs::path> mask_path;
    if (!axis_mask.empty()) mask_path = axis_mask;
    const auto img = load_chromosome(axis_image, mask_path, std::nullopt, {}, fs::path(axis_image).stem().string());
    const auto ax = longitudinal_axis(img.mask, cfg.tokenizer().axis);
    json pts = json::array();
    for (const auto& p : ax.points) pts.push_back({p.row, p.col});
    emit(stamped({{"instance_id", img.instance_id}, {"points", pts}, {"arclengths", ax.arclengths},
                  {"length", ax.length()}},
                 cfg),
         axis_json);
    if (!axis_png.empty()) write_png_rgb(axis_png, axis_overlay(img.pixels, ax));
  });

  // eval ----------------------------------------------------------------
  auto* ev = app.add_subcommand("eval", "Full pipeline: split, fit, tokenize, mine, train and score");
  ConfigFlags ev_flags;
  std::string ev_manifest, ev_out;
  add_config_flags(ev, ev_flags);
  ev->add_option("--manifest", ev_manifest)->required();
  ev->add_option("--out", ev_out, "Directory for metrics.csv and model JSONs");
  ev->callback([&] {
    const auto cfg = resolve(ev_flags);
    const auto images = load_images(read_manifest(ev_manifest));
    const auto r = run_experiment(images, cfg);
    if (!ev_out.empty()) {
      const fs::path dir(ev_out);
      write_text(dir / "metrics.csv", metrics_csv(r, cfg));
      save_json(dir / "config.json", stamped(config_to_json(cfg), cfg));
      save_json(dir / "model.json", stamped(model_to_json(r.model), cfg));
      save_json(dir / "bank.json", stamped(bank_to_json(r.bank), cfg));
      save_json(dir / "ngram.json", stamped(ngram_to_json(r.ngram), cfg));
      save_json(dir / "linear.json", stamped(linear_to_json(r.linear), cfg));
      write_tokens(dir / "test_tokens.tsv", r.test_sequences, cfg);
    }
    std::cout << json{{"instances", r.instances},
                      {"train", r.train_size},
                      {"test", r.test_size},
                      {"pattern_accuracy", r.pattern_accuracy},
                      {"linear_accuracy", r.linear_accuracy},
                      {"stamp", stamp(cfg)}}
                     .dump(1)
              << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", {{"code", "cli.usage"}, {"message", e.what()}}}}.dump() << '\n';
    return 2;
  }
  return 0;
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump() << '\n';
  } catch (const nlohmann::json::exception& e) {
    std::cerr << json{{"error", {{"code", "io.bad_json"}, {"message", e.what()}}}}.dump() << '\n';
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump() << '\n';
  }
  return 1;
}
