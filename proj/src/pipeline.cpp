// SPDX-License-Identifier: Apache-2.0
#include "kseq/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "kseq/error.hpp"
#include "kseq/parallel.hpp"

namespace kseq {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw Error("io.missing_field", std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error("io.bad_field", std::string("field '") + key + "': " + e.what());
  }
}

void check_version(const json& j, const char* what) {
  if (!j.is_object()) throw Error("io.bad_document", std::string(what) + " must be a JSON object");
  if (get<int>(j, "version") != kFormatVersion) {
    throw Error("io.unsupported_version", std::string("unsupported ") + what + " version");
  }
}

std::vector<std::vector<double>> to_rows(const std::vector<double>& flat, std::size_t dim) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; dim > 0 && i < flat.size(); i += dim) rows.emplace_back(flat.begin() + i, flat.begin() + i + dim);
  return rows;
}

std::vector<double> from_rows(const json& rows, std::size_t dim) {
  std::vector<double> flat;
  for (const auto& r : rows) {
    auto v = r.get<std::vector<double>>();
    if (v.size() != dim) throw Error("io.bad_field", "centroid row has the wrong dimension");
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return flat;
}

std::string context_key(const std::vector<int>& ctx) {
  std::string s;
  for (std::size_t i = 0; i < ctx.size(); ++i) s += (i ? "," : "") + std::to_string(ctx[i]);
  return s;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    int v = 0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || p != part.data() + part.size()) throw Error("io.bad_field", "bad integer list '" + s + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

TokenizerParams PipelineConfig::tokenizer() const {
  TokenizerParams p;
  p.patch_size = patch_size;
  p.fg_min = fg_min;
  p.lambda = lambda;
  p.min_run = min_run;
  p.max_sweeps = max_sweeps;
  p.histogram_bins = histogram_bins;
  return p;
}

json config_to_json(const PipelineConfig& c) {
  json j{{"patch_size", c.patch_size},
          {"fg_min", c.fg_min},
          {"histogram_bins", c.histogram_bins},
          {"K", c.K},
          {"K_over", c.K_over},
          {"max_iters", c.max_iters},
          {"lambda", c.lambda},
          {"max_sweeps", c.max_sweeps},
          {"min_run", c.min_run},
          {"d_pe", c.d_pe},
          {"ngram_order", c.ngram_order},
          {"ngram_alpha", c.ngram_alpha},
          {"min_support", c.min_support},
          {"pattern_max_len", c.pattern_max_len},
          {"threshold", c.threshold},
          {"split_ratio", {c.split_ratio.first, c.split_ratio.second}},
          {"seed", c.seed},
          {"linear", {{"learning_rate", c.linear.learning_rate}, {"l2", c.linear.l2}, {"epochs", c.linear.epochs}}}};
  if (!c.embeddings_dir.empty()) j["embeddings_dir"] = c.embeddings_dir;
  return j;
}

PipelineConfig config_from_json(const json& j, PipelineConfig c) {
  if (!j.is_object()) throw Error("config.bad_document", "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "patch_size") c.patch_size = v.get<int>();
      else if (key == "fg_min") c.fg_min = v.get<double>();
      else if (key == "histogram_bins") c.histogram_bins = v.get<int>();
      else if (key == "K") c.K = v.get<int>();
      else if (key == "K_over") c.K_over = v.get<int>();
      else if (key == "max_iters") c.max_iters = v.get<int>();
      else if (key == "lambda") c.lambda = v.get<double>();
      else if (key == "max_sweeps") c.max_sweeps = v.get<int>();
      else if (key == "min_run") c.min_run = v.get<int>();
      else if (key == "d_pe") c.d_pe = v.get<int>();
      else if (key == "ngram_order") c.ngram_order = v.get<int>();
      else if (key == "ngram_alpha") c.ngram_alpha = v.get<double>();
      else if (key == "min_support") c.min_support = v.get<double>();
      else if (key == "pattern_max_len") c.pattern_max_len = v.get<int>();
      else if (key == "threshold") c.threshold = v.get<double>();
      else if (key == "split_ratio") c.split_ratio = {v.at(0).get<int>(), v.at(1).get<int>()};
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "embeddings_dir") c.embeddings_dir = v.get<std::string>();
      else if (key == "linear") {
        for (const auto& [k2, v2] : v.items()) {
          if (k2 == "learning_rate") c.linear.learning_rate = v2.get<double>();
          else if (k2 == "l2") c.linear.l2 = v2.get<double>();
          else if (k2 == "epochs") c.linear.epochs = v2.get<int>();
          else throw Error("config.unknown_key", "unknown linear key '" + k2 + "'");
        }
      } else {
        throw Error("config.unknown_key", "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error("config.bad_value", e.what());
  }
  if (c.K < 1 || c.K_over < c.K) throw Error("config.bad_value", "need 1 <= K <= K_over");
  if (c.ngram_order < 1 || c.d_pe < 0 || c.d_pe % 2 != 0) throw Error("config.bad_value", "bad ngram_order or d_pe");
  return c;
}

std::string config_hash(const PipelineConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config_to_json(cfg).dump())));
  return buf;
}

json stamp(const PipelineConfig& cfg) {
  return {{"tool_version", kToolVersion}, {"config_hash", config_hash(cfg)}, {"seed", cfg.seed}};
}

json model_to_json(const ClusterModel& m) {
  json j{{"version", kFormatVersion},
         {"K", m.K},
         {"dim", m.dim},
         {"seed", m.seed},
         {"centroids", to_rows(m.centroids, m.dim)}};
  if (m.merged()) {
    j["merge_map"] = m.merge_map;
    j["over_centroids"] = to_rows(m.over_centroids, m.dim);
  }
  return j;
}

ClusterModel model_from_json(const json& j) {
  check_version(j, "cluster model");
  ClusterModel m;
  m.K = get<std::size_t>(j, "K");
  m.dim = get<std::size_t>(j, "dim");
  m.seed = get<std::uint64_t>(j, "seed");
  m.centroids = from_rows(get<json>(j, "centroids"), m.dim);
  if (m.centroids.size() != m.K * m.dim) throw Error("io.bad_field", "centroid count does not match K");
  if (j.contains("merge_map")) {
    m.merge_map = get<std::vector<int>>(j, "merge_map");
    m.over_centroids = from_rows(get<json>(j, "over_centroids"), m.dim);
    if (m.over_centroids.size() != m.merge_map.size() * m.dim) {
      throw Error("io.bad_field", "over_centroids do not match merge_map");
    }
    for (int t : m.merge_map) {
      if (t < 0 || t >= static_cast<int>(m.K)) throw Error("io.bad_field", "merge_map target out of range");
    }
  }
  return m;
}

json bank_to_json(const PatternBank& bank) {
  json classes = json::object();
  for (const auto& [label, cp] : bank.classes) {
    json frequent = json::array();
    for (const auto& p : cp.frequent) frequent.push_back({{"pattern", p.pattern}, {"support", p.support}});
    classes[std::to_string(label)] = {{"canonical", cp.canonical}, {"count", cp.count}, {"frequent", frequent}};
  }
  return {{"version", kFormatVersion},
          {"min_support", bank.min_support},
          {"max_len", bank.max_len},
          {"classes", classes}};
}

PatternBank bank_from_json(const json& j) {
  check_version(j, "pattern bank");
  PatternBank bank;
  bank.min_support = get<double>(j, "min_support");
  bank.max_len = get<int>(j, "max_len");
  const auto classes = get<json>(j, "classes");
  for (const auto& [key, v] : classes.items()) {
    ClassPatterns cp;
    cp.canonical = get<TokenList>(v, "canonical");
    cp.count = v.value("count", 0);
    for (const auto& p : v.value("frequent", json::array())) {
      cp.frequent.push_back({get<TokenList>(p, "pattern"), get<double>(p, "support")});
    }
    bank.classes[parse_ints(key).at(0)] = std::move(cp);
  }
  return bank;
}

json ngram_to_json(const NGramModel& m) {
  json counts = json::object();
  for (const auto& [ctx, next] : m.counts) {
    json row = json::object();
    for (const auto& [tok, n] : next) row[std::to_string(tok)] = n;
    counts[context_key(ctx)] = row;
  }
  return {{"version", kFormatVersion},
          {"order", m.order},
          {"vocab_size", m.vocab_size},
          {"alpha", m.alpha},
          {"counts", counts}};
}

NGramModel ngram_from_json(const json& j) {
  check_version(j, "n-gram model");
  NGramModel m;
  m.order = get<int>(j, "order");
  m.vocab_size = get<int>(j, "vocab_size");
  m.alpha = get<double>(j, "alpha");
  const auto counts = get<json>(j, "counts");
  for (const auto& [ctx, row] : counts.items()) {
    auto& dst = m.counts[ctx.empty() ? std::vector<int>{} : parse_ints(ctx)];
    for (const auto& [tok, n] : row.items()) dst[parse_ints(tok).at(0)] = n.get<double>();
  }
  return m;
}

json linear_to_json(const LinearClassifier& c) {
  return {{"version", kFormatVersion},
          {"num_classes", c.num_classes},
          {"num_features", c.num_features},
          {"weights", to_rows(c.weights, static_cast<std::size_t>(c.num_features))},
          {"bias", c.bias},
          {"feature_mean", c.feature_mean},
          {"feature_scale", c.feature_scale},
          {"trained_on", c.trained_on},
          {"hyperparams",
           {{"learning_rate", c.hyperparams.learning_rate},
            {"l2", c.hyperparams.l2},
            {"epochs", c.hyperparams.epochs},
            {"seed", c.hyperparams.seed}}},
          {"loss_history", c.loss_history}};
}

LinearClassifier linear_from_json(const json& j) {
  check_version(j, "linear model");
  LinearClassifier c;
  c.num_classes = get<int>(j, "num_classes");
  c.num_features = get<int>(j, "num_features");
  const auto f = static_cast<std::size_t>(c.num_features);
  c.weights = from_rows(get<json>(j, "weights"), f);
  c.bias = get<std::vector<double>>(j, "bias");
  c.feature_mean = get<std::vector<double>>(j, "feature_mean");
  c.feature_scale = get<std::vector<double>>(j, "feature_scale");
  const auto k = static_cast<std::size_t>(c.num_classes);
  if (c.weights.size() != k * f || c.bias.size() != k || c.feature_mean.size() != f || c.feature_scale.size() != f) {
    throw Error("io.bad_field", "linear model shapes are inconsistent");
  }
  c.trained_on = j.value("trained_on", "");
  const auto hp = get<json>(j, "hyperparams");
  c.hyperparams.learning_rate = get<double>(hp, "learning_rate");
  c.hyperparams.l2 = get<double>(hp, "l2");
  c.hyperparams.epochs = get<int>(hp, "epochs");
  c.hyperparams.seed = get<std::uint64_t>(hp, "seed");
  c.loss_history = j.value("loss_history", std::vector<double>{});
  return c;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io.unreadable", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("io.bad_json", path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("io.unwritable", "cannot write " + path.string());
  out << j.dump(1) << '\n';
}

std::string stamp_line(const PipelineConfig& cfg) {
  return "# tool_version=" + std::string(kToolVersion) + " config_hash=" + config_hash(cfg) +
         " seed=" + std::to_string(cfg.seed) + "\n";
}

std::string tokens_text(std::span<const TokenSequence> seqs, const PipelineConfig& cfg) {
  std::string out = stamp_line(cfg);
  for (const auto& s : seqs) out += format_token_line(s) + '\n';
  return out;
}

void write_tokens(const std::filesystem::path& path, std::span<const TokenSequence> seqs, const PipelineConfig& cfg) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io.unwritable", "cannot write " + path.string());
  out << tokens_text(seqs, cfg);
}

std::vector<TokenSequence> read_tokens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io.unreadable", "cannot open " + path.string());
  std::vector<TokenSequence> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_token_line(line));
  }
  return out;
}

std::vector<ChromosomeImage> load_images(std::span<const ManifestEntry> entries) {
  std::vector<ChromosomeImage> out(entries.size());
  parallel_for(entries.size(), [&](std::size_t i) { out[i] = load_entry(entries[i]); });
  return out;
}

FeatureMatrix image_features(const ChromosomeImage& img, const PatchGrid& grid, const PipelineConfig& cfg) {
  if (cfg.embeddings_dir.empty()) return banding_features(img, grid, cfg.histogram_bins);
  return import_embeddings(std::filesystem::path(cfg.embeddings_dir) / (img.instance_id + ".ksemb"), grid);
}

FeatureMatrix stack_features(std::span<const ChromosomeImage* const> images, const PipelineConfig& cfg) {
  std::vector<FeatureMatrix> per(images.size());
  parallel_for(images.size(), [&](std::size_t i) {
    const auto grid = extract_patches(*images[i], cfg.patch_size, cfg.fg_min);
    per[i] = image_features(*images[i], grid, cfg);
  });
  FeatureMatrix all;
  for (const auto& f : per) all.append(f);
  return all;
}

ClusterModel fit_vocabulary(std::span<const ChromosomeImage* const> images, const PipelineConfig& cfg) {
  const auto features = stack_features(images, cfg);
  auto model = fit_kmeans(features, cfg.K_over, cfg.stage_seed("fit"), cfg.max_iters);
  if (cfg.K_over > cfg.K) model = overcluster_merge(model, cfg.K, features);
  return order_clusters(model, static_cast<std::size_t>(cfg.histogram_bins));
}

std::vector<Tokenization> tokenize_all(std::span<const ChromosomeImage* const> images, const ClusterModel& model,
                                       const PipelineConfig& cfg) {
  std::vector<Tokenization> out(images.size());
  const auto params = cfg.tokenizer();
  parallel_for(images.size(), [&](std::size_t i) {
    if (cfg.embeddings_dir.empty()) {
      out[i] = tokenize_detailed(*images[i], model, params);
    } else {
      const auto imported = image_features(*images[i], extract_patches(*images[i], cfg.patch_size, cfg.fg_min), cfg);
      out[i] = tokenize_detailed(*images[i], model, params, &imported);
    }
  });
  return out;
}

Dataset pooled_dataset(std::span<const Tokenization> tokens, std::span<const ChromosomeImage* const> images,
                       const ClusterModel& model, const PipelineConfig& cfg) {
  Dataset d;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto v = pooled_features(tokens[i].features, encode(tokens[i].sequence, model, cfg.d_pe));
    if (d.num_features == 0) d.num_features = v.size();
    d.x.insert(d.x.end(), v.begin(), v.end());
    if (!images[i]->class_label) throw Error("pipeline.missing_label", images[i]->instance_id + " has no label");
    d.y.push_back(*images[i]->class_label);
  }
  return d;
}

ExperimentResult run_experiment(std::span<const ChromosomeImage> images, const PipelineConfig& cfg) {
  ExperimentResult r;
  r.instances = images.size();
  const auto split = stratified_split(images, cfg.split_ratio, cfg.stage_seed("split"));
  std::vector<const ChromosomeImage*> train, test;
  for (const auto& img : images) (split.test_ids.count(img.instance_id) ? test : train).push_back(&img);
  r.train_size = train.size();
  r.test_size = test.size();

  r.model = fit_vocabulary(train, cfg);
  const auto train_tok = tokenize_all(train, r.model, cfg);
  const auto test_tok = tokenize_all(test, r.model, cfg);

  std::vector<std::pair<int, TokenList>> labeled;
  std::vector<TokenList> interiors;
  std::set<int> present;
  for (std::size_t i = 0; i < train.size(); ++i) {
    labeled.emplace_back(*train[i]->class_label, train_tok[i].sequence.interior_vec());
    interiors.push_back(train_tok[i].sequence.interior_vec());
    present.insert(*train[i]->class_label);
  }
  const std::vector<int> required(present.begin(), present.end());
  r.bank = build_pattern_bank(labeled, cfg.min_support, cfg.pattern_max_len, required);
  r.ngram = fit_ngram(interiors, cfg.ngram_order, cfg.ngram_alpha, static_cast<int>(r.model.K));

  auto hp = cfg.linear;
  hp.seed = cfg.stage_seed("linear");
  r.linear = train_linear(pooled_dataset(train_tok, train, r.model, cfg), hp, kNumClasses);

  const auto test_data = pooled_dataset(test_tok, test, r.model, cfg);
  std::size_t pattern_hits = 0, linear_hits = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int truth = *test[i]->class_label;
    const int p = classify_by_pattern(test_tok[i].sequence, r.bank).label;
    const int l = r.linear.predict(test_data.row(i));
    pattern_hits += p == truth;
    linear_hits += l == truth;
    r.test_ids.push_back(test[i]->instance_id);
    r.test_labels.push_back(truth);
    r.pattern_predictions.push_back(p);
    r.linear_predictions.push_back(l);
    r.test_sequences.push_back(test_tok[i].sequence);
  }
  r.pattern_accuracy = safe_rate(pattern_hits, test.size());
  r.linear_accuracy = safe_rate(linear_hits, test.size());
  return r;
}

std::vector<SweepPoint> run_sweep(std::span<const ChromosomeImage> images, std::span<const char> abnormal,
                                  const PipelineConfig& cfg, const SweepGrid& grid) {
  if (abnormal.size() != images.size()) throw Error("pipeline.bad_input", "one abnormal flag per image required");
  const auto split = stratified_split(images, cfg.split_ratio, cfg.stage_seed("split"));
  std::vector<const ChromosomeImage*> train;
  std::vector<std::size_t> test;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (split.test_ids.count(images[i].instance_id)) test.push_back(i);
    else if (!abnormal[i]) train.push_back(&images[i]);
  }
  std::vector<const ChromosomeImage*> test_images;
  for (auto i : test) test_images.push_back(&images[i]);
  std::set<int> normal_train_classes;
  for (const auto* img : train) normal_train_classes.insert(*img->class_label);
  for (const auto* img : test_images) {
    if (!normal_train_classes.count(*img->class_label)) {
      throw Error("pipeline.missing_class", "class " + std::to_string(*img->class_label) +
                                                " has no normal training instance; add cases or lower the abnormal fraction");
    }
  }

  const auto Ks = grid.K.empty() ? std::vector<int>{cfg.K} : grid.K;
  const auto lambdas = grid.lambda.empty() ? std::vector<double>{cfg.lambda} : grid.lambda;
  const auto min_runs = grid.min_run.empty() ? std::vector<int>{cfg.min_run} : grid.min_run;
  std::vector<SweepPoint> points;
  for (int K : Ks) {
    PipelineConfig c = cfg;
    c.K = K;
    c.K_over = K * cfg.K_over / cfg.K;
    const auto model = fit_vocabulary(train, c);
    for (double lambda : lambdas) {
      for (int min_run : min_runs) {
        c.lambda = lambda;
        c.min_run = min_run;
        const auto train_tok = tokenize_all(train, model, c);
        std::vector<std::pair<int, TokenList>> labeled;
        for (std::size_t i = 0; i < train.size(); ++i) {
          labeled.emplace_back(*train[i]->class_label, train_tok[i].sequence.interior_vec());
        }
        const auto bank = build_pattern_bank(labeled, c.min_support, c.pattern_max_len);
        const auto test_tok = tokenize_all(test_images, model, c);
        std::vector<LabeledSequence> data;
        for (std::size_t k = 0; k < test.size(); ++k) {
          data.push_back({test_tok[k].sequence, *images[test[k]].class_label, abnormal[test[k]] != 0});
        }
        SweepParams base;
        base.K = K;
        base.lambda = lambda;
        base.min_run = min_run;
        const auto pts = sweep(data, bank, grid.thresholds, base);
        points.insert(points.end(), pts.begin(), pts.end());
      }
    }
  }
  return points;
}

std::map<std::string, bool> abnormal_flags(const json& ground_truth) {
  std::map<std::string, bool> out;
  const auto instances = get<json>(ground_truth, "instances");
  for (const auto& [id, v] : instances.items()) out[id] = v.contains("mutation");
  return out;
}

RgbImage axis_overlay(const Raster& pixels, const AxisPolyline& axis) {
  RgbImage out(pixels.rows(), pixels.cols());
  for (int r = 0; r < pixels.rows(); ++r) {
    for (int c = 0; c < pixels.cols(); ++c) out.set(r, c, pixels(r, c), pixels(r, c), pixels(r, c));
  }
  for (const auto& p : axis.points) out.set(p.row, p.col, 255, 0, 0);
  return out;
}

std::string metrics_csv(const ExperimentResult& r, const PipelineConfig& cfg) {
  std::ostringstream os;
  os << stamp_line(cfg);
  os << "metric,value\n";
  os << "instances," << r.instances << '\n';
  os << "train," << r.train_size << '\n';
  os << "test," << r.test_size << '\n';
  os << "pattern_accuracy," << fmt(r.pattern_accuracy) << '\n';
  os << "linear_accuracy," << fmt(r.linear_accuracy) << '\n';
  return os.str();
}

std::string sweep_csv(std::span<const SweepPoint> points, const PipelineConfig& cfg) {
  std::ostringstream os;
  os << stamp_line(cfg);
  os << "params,fn,fp,tn,tp,fnr,fpr\n";
  for (const auto& p : points) {
    os << p.params.describe() << ',' << p.fn << ',' << p.fp << ',' << p.tn << ',' << p.tp << ',' << fmt(p.fnr) << ','
       << fmt(p.fpr) << '\n';
  }
  return os.str();
}

std::string sweep_svg(std::span<const SweepPoint> points, std::span<const SweepPoint> front) {
  constexpr double kSize = 400, kPad = 50;
  auto x = [&](double fpr) { return kPad + fpr * (kSize - 2 * kPad); };
  auto y = [&](double fnr) { return kSize - kPad - fnr * (kSize - 2 * kPad); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << kPad << "\" y1=\"" << y(0) << "\" x2=\"" << x(1) << "\" y2=\"" << y(0)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kPad << "\" y1=\"" << y(0) << "\" x2=\"" << kPad << "\" y2=\"" << y(1)
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 15 << "\" text-anchor=\"middle\">FPR</text>\n";
  os << "<text x=\"15\" y=\"" << kSize / 2 << "\" transform=\"rotate(-90 15 " << kSize / 2
     << ")\" text-anchor=\"middle\">FNR</text>\n";
  for (const auto& p : points) {
    os << "<circle cx=\"" << fmt(x(p.fpr)) << "\" cy=\"" << fmt(y(p.fnr))
       << "\" r=\"3\" fill=\"none\" stroke=\"gray\"/>\n";
  }
  for (const auto& p : front) {
    os << "<circle cx=\"" << fmt(x(p.fpr)) << "\" cy=\"" << fmt(y(p.fnr)) << "\" r=\"4\" fill=\"red\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace kseq
