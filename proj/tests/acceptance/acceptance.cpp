// SPDX-License-Identifier: Apache-2.0
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "kseq/parallel.hpp"
#include "kseq/pipeline.hpp"
#include "kseq/synth.hpp"
#include "oracles.hpp"

using namespace kseq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "FAILED: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

fs::path g_workdir;

std::string join(std::span<const int> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out + "]";
}

std::vector<ChromosomeImage> images_of(const SynthDataset& d) {
  std::vector<ChromosomeImage> out;
  out.reserve(d.instances.size());
  for (const auto& i : d.instances) out.push_back(i.image);
  return out;
}

// Dataset-A-shaped set with the default moderate noise.
const std::vector<ChromosomeImage>& dataset_a() {
  static const std::vector<ChromosomeImage> images = images_of(generate_dataset(DatasetSpec{}));
  return images;
}

const ExperimentResult& dataset_a_run() {
  static const ExperimentResult r = run_experiment(dataset_a(), PipelineConfig{});
  return r;
}

ChromosomeImage rotate180(const ChromosomeImage& a) {
  const int rows = a.pixels.rows(), cols = a.pixels.cols();
  Raster px(rows, cols);
  Mask m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      px(r, c) = a.pixels(rows - 1 - r, cols - 1 - c);
      m(r, c) = a.mask(rows - 1 - r, cols - 1 - c);
    }
  }
  return make_chromosome(px, m, a.class_label, a.case_id, a.instance_id + "_rot");
}

// Framing, run collapsing and position ordering, checked without the
// library's own validator.
bool sequence_ok(const TokenSequence& s, std::size_t K) {
  if (s.tokens.size() < 3 || s.tokens.front() != kSoc || s.tokens.back() != kEoc) return false;
  const auto in = s.interior();
  if (in.size() != s.positions.size()) return false;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] < 0 || static_cast<std::size_t>(in[i]) >= K) return false;
    if (i > 0 && in[i] == in[i - 1]) return false;
    if (s.positions[i] < 0.0 || s.positions[i] > 1.0) return false;
    if (i > 0 && !(s.positions[i] > s.positions[i - 1])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

void criterion_inserted_band(Outcome& o) {
  DatasetSpec spec;
  spec.cases_male = 2;
  spec.cases_female = 2;
  spec.noise = {0.0, 0.0, 0.0};
  const auto data = generate_dataset(spec);
  const auto images = images_of(data);
  std::vector<const ChromosomeImage*> ptrs;
  for (const auto& i : images) ptrs.push_back(&i);
  const PipelineConfig cfg;
  const auto model = fit_vocabulary(ptrs, cfg);
  const auto toks = tokenize_all(ptrs, model, cfg);
  std::vector<std::pair<int, TokenList>> labeled;
  for (std::size_t i = 0; i < images.size(); ++i) labeled.push_back({*images[i].class_label, toks[i].sequence.interior_vec()});
  const auto bank = build_pattern_bank(labeled, cfg.min_support, cfg.pattern_max_len);

  const auto& p0 = standard_programs()[0];
  const auto normal = tokenize(generate_chromosome(p0, 11, spec.noise).image, model, cfg.tokenizer());
  const Mutation extra{MutationKind::band_insertion, 3, Band{palette_intensity(0), 0.2}, 1};
  const auto abnormal = tokenize(generate_chromosome(mutate(p0, extra), 11, spec.noise).image, model, cfg.tokenizer());
  const auto det = detect_abnormal(abnormal, bank, 0, 0.0);
  const auto det_normal = detect_abnormal(normal, bank, 0, 0.0);

  o.detail << "normal " << join(normal.interior()) << ", inserted " << join(abnormal.interior()) << ", canonical "
           << join(bank.classes.at(0).canonical) << ", verdict "
           << (det.verdict == Verdict::abnormal ? "abnormal" : "normal");
  if (det.edit_script.size() == 1) {
    o.detail << " via " << to_string(det.edit_script[0].op) << "(" << det.edit_script[0].index << ","
             << det.edit_script[0].token << ")";
  }
  o.require(normal.interior_vec() == TokenList{2, 0, 1, 2}, "normal interior");
  o.require(abnormal.interior_vec() == TokenList{2, 0, 1, 0, 2}, "mutated interior");
  o.require(bank.classes.at(0).canonical == TokenList{2, 0, 1, 2}, "class-0 canonical");
  o.require(det_normal.verdict == Verdict::normal, "normal flagged");
  o.require(det.verdict == Verdict::abnormal && det.score == 1.0, "mutated not flagged");
  o.require(det.edit_script.size() == 1 && det.edit_script[0].op == EditOp::insert && det.edit_script[0].token == 0,
            "edit script");
}

void criterion_classification(Outcome& o) {
  const auto& images = dataset_a();
  std::map<int, int> counts;
  for (const auto& i : images) ++counts[*i.class_label];
  bool table = images.size() == 2990 && counts[22] == 98 && counts[23] == 32;
  for (int c = 0; c < 22; ++c) table = table && counts[c] == 130;

  const auto& r = dataset_a_run();
  const auto again = run_experiment(images, PipelineConfig{});
  const bool deterministic = again.pattern_predictions == r.pattern_predictions &&
                             again.linear_predictions == r.linear_predictions && again.model == r.model &&
                             again.linear.weights == r.linear.weights;
  o.detail << "instances " << r.instances << ", test " << r.test_size << ", pattern " << r.pattern_accuracy
           << ", linear " << r.linear_accuracy << ", threads " << worker_count();
  o.require(table, "class counts");
  o.require(r.test_size >= 299 - 24 && r.test_size <= 299 + 24, "test size");
  o.require(r.pattern_accuracy >= 0.95, "pattern accuracy");
  o.require(r.linear_accuracy >= 0.90, "linear accuracy");
  o.require(deterministic, "rerun differs");
}

bool same_points(const std::vector<SweepPoint>& a, const std::vector<SweepPoint>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].fnr != b[i].fnr || a[i].fpr != b[i].fpr || a[i].params.describe() != b[i].params.describe()) return false;
  }
  return true;
}

void criterion_sweep(Outcome& o) {
  DatasetSpec spec;
  spec.abnormal_fraction = 0.5;
  const auto data = generate_dataset(spec);
  const auto images = images_of(data);
  std::vector<char> abnormal;
  std::size_t n_abnormal = 0;
  for (const auto& i : data.instances) {
    abnormal.push_back(i.truth.mutation ? 1 : 0);
    n_abnormal += i.truth.mutation.has_value();
  }
  SweepGrid grid;
  grid.thresholds = {0.0, 1.0, 2.0, 3.0, 4.0};
  grid.K = {6, 8};
  grid.lambda = {0.0, 0.25};
  grid.min_run = {1, 2};
  const auto points = run_sweep(images, abnormal, PipelineConfig{}, grid);

  std::map<std::string, std::vector<SweepPoint>> groups;
  for (const auto& p : points) {
    SweepParams key = p.params;
    key.threshold = 0.0;
    groups[key.describe()].push_back(p);
  }
  bool monotone = true;
  for (auto& [_, g] : groups) {
    std::stable_sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.params.threshold < b.params.threshold; });
    for (std::size_t i = 1; i < g.size(); ++i) {
      monotone = monotone && g[i].fnr >= g[i - 1].fnr && g[i].fpr <= g[i - 1].fpr;
    }
  }
  const auto front = pareto_front(points);
  bool front_ok = same_points(front, oracle::pareto(points));
  for (const auto& [_, g] : groups) front_ok = front_ok && same_points(pareto_front(g), oracle::pareto(g));

  bool random_ok = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(seed, "pareto"));
    std::vector<SweepPoint> pts(1000);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      // Every other set is drawn on a coarse lattice so that ties occur.
      pts[i].fnr = seed % 2 ? rng.uniform() : static_cast<double>(rng.below(25)) / 25.0;
      pts[i].fpr = seed % 2 ? rng.uniform() : static_cast<double>(rng.below(25)) / 25.0;
      pts[i].params.threshold = static_cast<double>(i);
    }
    random_ok = random_ok && same_points(pareto_front(pts), oracle::pareto(pts));
  }

  const SweepPoint* best = nullptr;
  for (const auto& p : front) {
    if (!best || p.fnr + p.fpr < best->fnr + best->fpr) best = &p;
  }
  o.detail << "instances " << images.size() << " (" << n_abnormal << " abnormal), " << points.size() << " points, front "
           << front.size();
  if (best) o.detail << ", best " << best->params.describe() << " fnr " << best->fnr << " fpr " << best->fpr;
  o.require(n_abnormal == 1495, "abnormal count");
  o.require(monotone, "monotonicity");
  o.require(front_ok, "pareto on sweep output");
  o.require(random_ok, "pareto on random sets");
}

void criterion_oracles(Outcome& o) {
  std::size_t fp_cases = 0, fp_bad = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(seed, "fpgrowth"));
    const int universe = 1 + static_cast<int>(rng.below(12));
    std::vector<std::vector<int>> tx(1 + rng.below(200));
    const double density = rng.uniform(0.1, 0.8);
    for (auto& t : tx) {
      for (int item = 0; item < universe; ++item) {
        if (rng.uniform() < density) t.push_back(item);
      }
    }
    const double ms = rng.uniform(0.02, 0.7);
    const auto got = fpgrowth(tx, ms);
    const auto want = oracle::apriori(tx, ms);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].items == want[i].items && std::abs(got[i].support - want[i].support) < 1e-12;
    }
    ++fp_cases;
    fp_bad += !same;
  }

  std::size_t ed_bad = 0;
  Rng rng(derive_seed(1, "edit"));
  auto random_list = [&](std::size_t max_len) {
    TokenList v(rng.below(max_len + 1));
    for (auto& t : v) t = static_cast<int>(rng.below(5));
    return v;
  };
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_list(8), b = random_list(8);
    const auto r = edit_distance(a, b);
    ed_bad += r.distance != oracle::edit_distance(a, b) || apply_script(a, r.script) != b;
  }

  std::size_t as_bad = 0, as_cases = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng r2(derive_seed(seed, "assign"));
    const std::size_t dim = 1 + r2.below(6), k = 1 + r2.below(10), n = 50 + r2.below(200);
    std::vector<double> x(n * dim);
    for (auto& v : x) v = static_cast<double>(r2.below(5));  // integer grid forces ties
    ClusterModel m;
    m.K = k;
    m.dim = dim;
    m.centroids.resize(k * dim);
    for (auto& v : m.centroids) v = static_cast<double>(r2.below(5));
    std::vector<int> refs(n);
    std::iota(refs.begin(), refs.end(), 0);
    const FeatureMatrix f(dim, x, refs);
    as_bad += assign(m, f).labels != oracle::nearest_centroid(x, n, m.centroids, k, dim);
    ++as_cases;
  }

  std::size_t ms_bad = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r3(derive_seed(seed, "windows"));
    std::vector<TokenList> seqs(1 + r3.below(100));
    const int vocab = 2 + static_cast<int>(r3.below(6));
    for (auto& s : seqs) {
      s.resize(1 + r3.below(12));
      for (auto& t : s) t = static_cast<int>(r3.below(static_cast<std::uint64_t>(vocab)));
    }
    const double support = r3.uniform(0.02, 0.6);
    const int max_len = 1 + static_cast<int>(r3.below(8));
    const auto got = mine_subsequences(seqs, support, max_len);
    const auto want = oracle::window_patterns(seqs, support, max_len);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].pattern == want[i].pattern && std::abs(got[i].support - want[i].support) < 1e-12;
    }
    ms_bad += !same;
  }
  o.detail << "fpgrowth " << fp_cases - fp_bad << "/" << fp_cases << ", edit_distance " << 1000 - ed_bad
           << "/1000, assign " << as_cases - as_bad << "/" << as_cases << ", mine_subsequences " << 100 - ms_bad
           << "/100";
  o.require(fp_bad == 0, "fpgrowth");
  o.require(ed_bad == 0, "edit_distance");
  o.require(as_bad == 0, "assign");
  o.require(ms_bad == 0, "mine_subsequences");
}

void criterion_numerics(Outcome& o) {
  // Gradient check on a small random problem.
  Rng rng(derive_seed(5, "gradient"));
  Dataset d;
  d.num_features = 6;
  const int classes = 5;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 6; ++j) d.x.push_back(rng.normal());
    d.y.push_back(i % classes);
  }
  std::vector<double> w(classes * 6), b(classes);
  for (auto& v : w) v = rng.uniform(-1.0, 1.0);
  for (auto& v : b) v = rng.uniform(-1.0, 1.0);
  std::vector<double> grad;
  linear_loss(d, classes, w, b, 1e-3, &grad);
  double worst = 0.0;
  const double eps = 1e-5;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    double& target = k < w.size() ? w[k] : b[k - w.size()];
    const double saved = target;
    target = saved + eps;
    const double up = linear_loss(d, classes, w, b, 1e-3);
    target = saved - eps;
    const double down = linear_loss(d, classes, w, b, 1e-3);
    target = saved;
    const double fd = (up - down) / (2.0 * eps);
    worst = std::max(worst, std::abs(fd - grad[k]) / std::max({std::abs(fd), std::abs(grad[k]), 1e-8}));
  }

  // k-means traces and smoothing energies on real patch features.
  const auto& images = dataset_a();
  std::vector<const ChromosomeImage*> sample;
  for (std::size_t i = 0; i < images.size(); i += 23) sample.push_back(&images[i]);
  const PipelineConfig cfg;
  const auto features = stack_features(sample, cfg);
  bool kmeans_ok = true;
  int traces = 0;
  for (int K : {2, 8, 24}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      FitTrace trace;
      fit_kmeans(features, K, seed, kDefaultMaxIters, &trace);
      for (std::size_t i = 1; i < trace.objective.size(); ++i) {
        kmeans_ok = kmeans_ok && trace.objective[i] <= trace.objective[i - 1];
      }
      ++traces;
    }
  }
  const auto model = dataset_a_run().model;
  bool energy_ok = true;
  std::size_t fields = 0;
  for (const auto* img : sample) {
    const auto grid = extract_patches(*img, cfg.patch_size, cfg.fg_min);
    const auto f = banding_features(*img, grid);
    for (double lambda : {0.1, 0.25, 1.0, 4.0}) {
      std::vector<double> trace;
      smooth_labels(assign(model, f), grid, model, f, lambda, cfg.max_sweeps, &trace);
      for (std::size_t i = 1; i < trace.size(); ++i) energy_ok = energy_ok && trace[i] <= trace[i - 1];
      ++fields;
    }
  }

  // n-gram normalization over every observed and one unseen context.
  const auto& r = dataset_a_run();
  double ngram_worst = 0.0;
  std::vector<std::vector<int>> contexts;
  for (const auto& [ctx, _] : r.ngram.counts) contexts.push_back(ctx);
  contexts.push_back(std::vector<int>(static_cast<std::size_t>(r.ngram.order - 1), r.ngram.vocab_size - 1));
  for (const auto& ctx : contexts) {
    double total = r.ngram.probability(ctx, kEoc);
    for (int t = 0; t < r.ngram.vocab_size; ++t) total += r.ngram.probability(ctx, t);
    ngram_worst = std::max(ngram_worst, std::abs(total - 1.0));
  }
  o.detail << "gradient max rel err " << worst << ", " << traces << " k-means traces, " << fields
           << " smoothing traces, n-gram max |sum-1| " << ngram_worst << " over " << contexts.size() << " contexts";
  o.require(worst < 1e-4, "gradient");
  o.require(kmeans_ok, "k-means objective increased");
  o.require(energy_ok, "smoothing energy increased");
  o.require(ngram_worst <= 1e-9, "n-gram normalization");
}

void criterion_morphology(Outcome& o) {
  std::size_t bars = 0, bars_bad = 0;
  for (int w : {3, 5, 7, 9, 11, 13}) {
    for (int len : {w + 6, 25, 40, 64, 101}) {
      for (bool vertical : {false, true}) {
        const int rows = vertical ? len + 6 : w + 6, cols = vertical ? w + 6 : len + 6;
        Mask m(rows, cols, 0);
        for (int i = 0; i < len; ++i) {
          for (int j = 0; j < w; ++j) {
            if (vertical) m(3 + i, 3 + j) = 1;
            else m(3 + j, 3 + i) = 1;
          }
        }
        const auto axis = longitudinal_axis(m);
        bool ok = static_cast<int>(axis.points.size()) == len && std::abs(axis.length() - (len - 1)) < 1e-12;
        for (std::size_t i = 0; ok && i < axis.points.size(); ++i) {
          const auto& p = axis.points[i];
          ok = vertical ? (p.col == 3 + w / 2 && p.row == 3 + static_cast<int>(i))
                        : (p.row == 3 + w / 2 && p.col == 3 + static_cast<int>(i));
        }
        ++bars;
        bars_bad += !ok;
      }
    }
  }

  int hits = 0;
  double worst = 0.0;
  const NoiseSpec bent{8.0, 0.1, 1.0};
  for (int i = 0; i < 500; ++i) {
    Rng rng(derive_seed(static_cast<std::uint64_t>(i), "bent"));
    const auto& p = standard_programs()[rng.below(24)];
    const auto g = generate_chromosome(p, rng.next(), bent);
    const auto axis = longitudinal_axis(g.image.mask);
    auto dist = [](PixelPos a, PixelPos b) { return std::hypot(a.row - b.row, a.col - b.col); };
    const auto s = axis.points.front(), e = axis.points.back();
    const auto& t = g.truth.tips;
    const double err = std::min(std::max(dist(s, t[0]), dist(e, t[1])), std::max(dist(s, t[1]), dist(e, t[0])));
    worst = std::max(worst, err);
    hits += err <= 2.0;
  }

  std::size_t erosion_bad = 0;
  Rng rng(derive_seed(6, "erosion"));
  for (int i = 0; i < 1000; ++i) {
    const int rows = 1 + static_cast<int>(rng.below(24)), cols = 1 + static_cast<int>(rng.below(24));
    const auto a = oracle::random_mask(rng, rows, cols, rng.uniform(0.3, 0.95));
    auto b = a;
    for (auto& v : b.data()) v = v || rng.uniform() < 0.2;
    const auto se = i % 3 == 0 ? StructuringElement::cross() : StructuringElement::box();
    const auto ea = erode(a, se), eb = erode(b, se);
    erosion_bad += !(oracle::subset_of(ea, a) && oracle::subset_of(ea, eb) && ea == oracle::erode(a, se));
  }
  o.detail << "straight bars " << bars - bars_bad << "/" << bars << " exact, bent tips " << hits
           << "/500 within 2 px (worst " << worst << "), erosion properties " << 1000 - erosion_bad << "/1000";
  o.require(bars_bad == 0, "straight bar centreline");
  o.require(hits >= 475, "bent tips");
  o.require(erosion_bad == 0, "erosion properties");
}

void criterion_invariants(Outcome& o) {
  const auto& r = dataset_a_run();
  const PipelineConfig cfg;
  const auto& images = dataset_a();
  std::vector<const ChromosomeImage*> ptrs;
  for (const auto& i : images) ptrs.push_back(&i);
  const auto all = tokenize_all(ptrs, r.model, cfg);
  std::size_t checked = 0, bad = 0;
  for (const auto& t : all) {
    ++checked;
    bad += !sequence_ok(t.sequence, r.model.K);
  }
  for (const auto& s : r.test_sequences) {
    ++checked;
    bad += !sequence_ok(s, r.model.K);
  }

  std::size_t rot_same = 0;
  const NoiseSpec noise{8.0, 0.1, 0.5};
  for (int i = 0; i < 200; ++i) {
    Rng rng(derive_seed(static_cast<std::uint64_t>(i), "rotation"));
    const auto& p = standard_programs()[rng.below(24)];
    const auto g = generate_chromosome(p, rng.next(), noise);
    const auto a = tokenize(g.image, r.model, cfg.tokenizer());
    const auto b = tokenize(rotate180(g.image), r.model, cfg.tokenizer());
    ++checked;
    bad += !sequence_ok(a, r.model.K) || !sequence_ok(b, r.model.K);
    rot_same += a.tokens == b.tokens;
  }
  o.detail << checked << " sequences checked (" << bad << " violations), rotation " << rot_same << "/200 identical";
  o.require(bad == 0, "sequence invariants");
  o.require(rot_same == 200, "rotation invariance");
}

std::map<std::string, std::string> full_run(const fs::path& dir) {
  fs::remove_all(dir);
  DatasetSpec spec;
  spec.cases_male = 8;
  spec.cases_female = 8;
  spec.abnormal_fraction = 0.1;
  PipelineConfig cfg;
  const auto manifest = write_dataset(generate_dataset(spec), dir / "data", RasterFormat::png, stamp(cfg));
  const auto images = load_images(read_manifest(manifest));
  const auto r = run_experiment(images, cfg);
  auto stamped = [&](nlohmann::json j) {
    j["stamp"] = stamp(cfg);
    return j;
  };
  {
    std::ofstream(dir / "metrics.csv", std::ios::binary) << metrics_csv(r, cfg);
  }
  save_json(dir / "config.json", stamped(config_to_json(cfg)));
  save_json(dir / "model.json", stamped(model_to_json(r.model)));
  save_json(dir / "bank.json", stamped(bank_to_json(r.bank)));
  save_json(dir / "ngram.json", stamped(ngram_to_json(r.ngram)));
  save_json(dir / "linear.json", stamped(linear_to_json(r.linear)));
  write_tokens(dir / "test_tokens.tsv", r.test_sequences, cfg);

  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    out[fs::relative(entry.path(), dir).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return out;
}

void criterion_reproducibility(Outcome& o) {
  const auto a = full_run(g_workdir / "repro1");
  const auto b = full_run(g_workdir / "repro2");
  std::size_t differ = 0;
  std::string first;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      if (first.empty()) first = name;
      ++differ;
    }
  }
  const std::vector<std::string> required{"metrics.csv", "model.json", "bank.json", "ngram.json", "linear.json"};
  bool present = true;
  for (const auto& f : required) present = present && a.count(f) && !a.at(f).empty();
  o.detail << a.size() << " files per run, " << differ << " differ";
  if (!first.empty()) o.detail << " (first: " << first << ")";
  o.require(a.size() == b.size(), "file sets differ");
  o.require(differ == 0, "byte differences");
  o.require(present, "missing artifacts");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kseq acceptance checks"};
  std::string workdir = (fs::temp_directory_path() / "kseq_acceptance").string();
  std::vector<int> only;
  app.add_option("--workdir", workdir, "Scratch directory for generated files");
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  g_workdir = workdir;
  fs::create_directories(g_workdir);

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"inserted-band-divergence", criterion_inserted_band},
      {"synthetic-classification", criterion_classification},
      {"abnormality-sweep", criterion_sweep},
      {"oracle-equivalences", criterion_oracles},
      {"numerical-checks", criterion_numerics},
      {"morphology", criterion_morphology},
      {"sequence-invariants", criterion_invariants},
      {"reproducibility", criterion_reproducibility},
  };
  const std::map<int, double> limits{{1, 5.0}, {2, 600.0}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (auto it = limits.find(id); it != limits.end()) o.require(secs < it->second, "runtime limit");
    failures += !o.pass;
    std::printf("%s %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
