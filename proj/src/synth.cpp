// SPDX-License-Identifier: Apache-2.0
#include "kseq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "kseq/error.hpp"
#include "kseq/parallel.hpp"
#include "kseq/tokenizer.hpp"

namespace kseq {
namespace {

// Palette levels per class; pairwise edit distance between the
// orientation-canonical forms is at least 2.
const std::array<std::vector<int>, kNumClasses> kClassLevels{{
    {2, 0, 1, 2},
    {4, 0, 6, 7, 3, 5},
    {1, 5, 3, 6, 4},
    {2, 7, 4, 0, 5},
    {1, 3, 7, 6, 2},
    {0, 4, 6, 1, 5},
    {0, 5, 7, 3, 6},
    {1, 7, 2, 4},
    {4, 6, 3, 7},
    {1, 2, 0, 5},
    {2, 5, 0, 3},
    {3, 1, 7, 6},
    {4, 7, 5},
    {0, 3, 1},
    {2, 6, 4},
    {1, 5, 7},
    {5, 4, 6},
    {0, 2, 3},
    {2, 1, 7},
    {3, 0, 4},
    {5, 6, 7},
    {1, 4, 2},
    {4, 3, 2, 6},  // X
    {0, 5},        // Y
}};

int class_length(int label) {
  if (label == kClassX) return 152;
  if (label == kClassY) return 64;
  return static_cast<int>(std::lround(200.0 - 128.0 * label / 21.0));
}

std::vector<int> canonical_levels(std::vector<int> levels) {
  if (canonical_orientation(levels) == Orientation::reversed) std::reverse(levels.begin(), levels.end());
  return levels;
}

struct Vec2 {
  double r = 0.0, c = 0.0;
};
Vec2 operator+(Vec2 a, Vec2 b) { return {a.r + b.r, a.c + b.c}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.r - b.r, a.c - b.c}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.r, s * a.c}; }
double dot(Vec2 a, Vec2 b) { return a.r * b.r + a.c * b.c; }

struct Segment {
  Vec2 from, dir;  // dir is unit length
  double length = 0.0;
  double offset = 0.0;  // centreline arclength at `from`
};

}  // namespace

int palette_level(int intensity) {
  return std::clamp(static_cast<int>(std::lround((intensity - 16) / 32.0)), 0, kPaletteSize - 1);
}

std::vector<int> BandProgram::levels() const {
  std::vector<int> out;
  for (const auto& b : bands) out.push_back(palette_level(b.intensity));
  return out;
}

const std::vector<BandProgram>& standard_programs() {
  static const std::vector<BandProgram> programs = [] {
    std::vector<BandProgram> out;
    for (int c = 0; c < kNumClasses; ++c) {
      BandProgram p;
      p.class_label = c;
      p.base_length = class_length(c);
      const auto& levels = kClassLevels[static_cast<std::size_t>(c)];
      for (int level : levels) p.bands.push_back({palette_intensity(level), 1.0 / static_cast<double>(levels.size())});
      out.push_back(std::move(p));
    }
    return out;
  }();
  return programs;
}

void validate_program(const BandProgram& program) {
  if (program.class_label < 0 || program.class_label >= kNumClasses) {
    throw Error("synth.bad_program", "class label out of range");
  }
  if (program.bands.size() < 2) throw Error("synth.bad_program", "a program needs at least two bands");
  double total = 0.0;
  for (const auto& b : program.bands) {
    if (b.intensity < 0 || b.intensity > 255 || !(b.length_fraction > 0.0)) {
      throw Error("synth.bad_program", "band intensity or fraction out of range");
    }
    total += b.length_fraction;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("synth.bad_program", "band fractions must sum to 1");
  if (program.base_width < 2 || program.base_length < 1) throw Error("synth.bad_program", "bad geometry");
}

std::string to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::band_insertion: return "band_insertion";
    case MutationKind::band_deletion: return "band_deletion";
    case MutationKind::band_inversion: return "band_inversion";
  }
  return "?";
}

nlohmann::json to_json(const Mutation& m) {
  nlohmann::json j{{"kind", to_string(m.kind)}, {"site", m.site}};
  if (m.payload) j["payload"] = {{"intensity", m.payload->intensity}, {"length_fraction", m.payload->length_fraction}};
  if (m.kind == MutationKind::band_inversion) j["span"] = m.span;
  return j;
}

BandProgram mutate(const BandProgram& program, const Mutation& mutation) {
  BandProgram out = program;
  auto& bands = out.bands;
  const int n = static_cast<int>(bands.size());
  switch (mutation.kind) {
    case MutationKind::band_insertion: {
      if (mutation.site < 0 || mutation.site > n) throw Error("synth.bad_site", "insertion site out of range");
      if (!mutation.payload) throw Error("synth.bad_mutation", "insertion needs a payload band");
      const double f = mutation.payload->length_fraction;
      if (!(f > 0.0 && f < 1.0)) throw Error("synth.bad_mutation", "payload fraction must lie in (0, 1)");
      for (auto& b : bands) b.length_fraction *= 1.0 - f;
      bands.insert(bands.begin() + mutation.site, *mutation.payload);
      break;
    }
    case MutationKind::band_deletion: {
      if (mutation.site < 0 || mutation.site >= n) throw Error("synth.bad_site", "deletion site out of range");
      if (n - 1 < 2) throw Error("synth.too_few_bands", "deletion would leave fewer than two bands");
      const double f = bands[static_cast<std::size_t>(mutation.site)].length_fraction;
      bands.erase(bands.begin() + mutation.site);
      for (auto& b : bands) b.length_fraction /= 1.0 - f;
      break;
    }
    case MutationKind::band_inversion: {
      if (mutation.span < 1 || mutation.site < 0 || mutation.site + mutation.span > n) {
        throw Error("synth.bad_site", "inversion range out of range");
      }
      std::reverse(bands.begin() + mutation.site, bands.begin() + mutation.site + mutation.span);
      break;
    }
  }
  return out;
}

Mutation random_mutation(const BandProgram& program, Rng& rng) {
  const auto base = canonical_levels(program.levels());
  const int n = static_cast<int>(program.bands.size());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Mutation m;
    m.kind = static_cast<MutationKind>(rng.below(3));
    if (m.kind == MutationKind::band_insertion) {
      m.site = static_cast<int>(rng.below(static_cast<std::uint64_t>(n + 1)));
      const int level = static_cast<int>(rng.below(kPaletteSize));
      m.payload = Band{palette_intensity(level), 1.0 / (n + 1)};
    } else if (m.kind == MutationKind::band_deletion) {
      if (n < 3) continue;
      m.site = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      m.span = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
      m.site = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - m.span + 1)));
    }
    const auto levels = mutate(program, m).levels();
    if (std::adjacent_find(levels.begin(), levels.end()) != levels.end()) continue;
    if (canonical_levels(levels) == base) continue;
    return m;
  }
  throw Error("synth.no_mutation", "could not find a valid mutation");
}

SynthChromosome generate_chromosome(const BandProgram& program, std::uint64_t seed, const NoiseSpec& noise,
                                    std::string case_id, std::string instance_id) {
  validate_program(program);
  Rng rng(seed);
  const std::size_t nb = program.bands.size();
  std::vector<double> band_len(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const double jitter = noise.length_jitter * rng.uniform(-1.0, 1.0);
    band_len[i] = program.bands[i].length_fraction * program.base_length * (1.0 + jitter);
  }
  const double total = std::accumulate(band_len.begin(), band_len.end(), 0.0);
  const double width = program.base_width;
  if (total < 2.0 * width) throw Error("synth.degenerate_geometry", "chromosome shorter than twice its width");
  const double radius = width / 2.0;
  const double centre_len = total - width;

  // Fixed draw order keeps the stream layout independent of which branch fires.
  const bool bent = rng.uniform() < noise.bend_prob;
  const double joint_frac = rng.uniform(0.35, 0.65);
  const double angle_mag = rng.uniform(0.35, std::max(0.35, program.curvature));
  const double angle = (rng.below(2) ? 1.0 : -1.0) * angle_mag;
  const int shift_r = static_cast<int>(rng.below(8));
  const int shift_c = static_cast<int>(rng.below(8));

  const Vec2 d0{1.0, 0.0};
  std::vector<Segment> segs;
  Vec2 end_dir = d0;
  if (bent) {
    const double a = joint_frac * centre_len;
    end_dir = {std::cos(angle), std::sin(angle)};
    segs.push_back({{0.0, 0.0}, d0, a, 0.0});
    segs.push_back({a * d0, end_dir, centre_len - a, a});
  } else {
    segs.push_back({{0.0, 0.0}, d0, centre_len, 0.0});
  }
  const Vec2 start{0.0, 0.0};
  const Vec2 finish = segs.back().from + segs.back().length * segs.back().dir;
  const Vec2 tip0 = start - radius * d0;
  const Vec2 tip1 = finish + radius * end_dir;

  double min_r = std::numeric_limits<double>::infinity(), max_r = -min_r, min_c = min_r, max_c = -min_r;
  for (const auto& s : segs) {
    for (Vec2 p : {s.from, s.from + s.length * s.dir}) {
      min_r = std::min(min_r, p.r - radius);
      max_r = std::max(max_r, p.r + radius);
      min_c = std::min(min_c, p.c - radius);
      max_c = std::max(max_c, p.c + radius);
    }
  }
  constexpr int kMargin = 4;
  const Vec2 origin{std::floor(min_r) - kMargin - shift_r, std::floor(min_c) - kMargin - shift_c + 0.5};
  auto round_up8 = [](double v) { return (static_cast<int>(std::ceil(v)) + 7) / 8 * 8; };
  const int rows = round_up8(max_r - origin.r + kMargin + 1);
  const int cols = round_up8(max_c - origin.c + kMargin + 1);

  std::vector<double> band_end(nb);
  std::partial_sum(band_len.begin(), band_len.end(), band_end.begin());

  Raster pixels(rows, cols, 255);
  Mask mask(rows, cols, 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Vec2 q = Vec2{static_cast<double>(r), static_cast<double>(c)} + origin;
      double best_d = std::numeric_limits<double>::infinity();
      double along = 0.0;
      for (std::size_t k = 0; k < segs.size(); ++k) {
        const auto& s = segs[k];
        const double t_raw = dot(q - s.from, s.dir);
        const double t = std::clamp(t_raw, 0.0, s.length);
        const Vec2 foot = s.from + t * s.dir;
        const Vec2 diff = q - foot;
        const double d = std::sqrt(dot(diff, diff));
        if (d < best_d) {
          best_d = d;
          // Beyond the free ends the raw projection keeps counting so the caps
          // continue the end bands.
          const bool free_start = k == 0 && t_raw < 0.0;
          const bool free_end = k + 1 == segs.size() && t_raw > s.length;
          along = s.offset + ((free_start || free_end) ? t_raw : t);
        }
      }
      if (best_d >= radius) continue;
      const double arc = std::clamp(along + radius, 0.0, total);
      std::size_t band = static_cast<std::size_t>(std::lower_bound(band_end.begin(), band_end.end(), arc) - band_end.begin());
      band = std::min(band, nb - 1);
      double v = program.bands[band].intensity;
      if (noise.intensity_sigma > 0.0) v += noise.intensity_sigma * rng.normal();
      pixels(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 254L));
      mask(r, c) = 1;
    }
  }

  auto nearest_pixel = [&](Vec2 p) {
    PixelPos best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (!mask(r, c)) continue;
        const Vec2 d = Vec2{static_cast<double>(r), static_cast<double>(c)} + origin - p;
        const double dd = dot(d, d);
        if (dd < best_d) {
          best_d = dd;
          best = {r, c};
        }
      }
    }
    return best;
  };

  SynthChromosome out;
  out.truth.band_levels = program.levels();
  out.truth.base_class = program.class_label;
  out.truth.tips = {nearest_pixel(tip0), nearest_pixel(tip1)};
  out.image = make_chromosome(std::move(pixels), std::move(mask), program.class_label, std::move(case_id),
                              std::move(instance_id));
  return out;
}

DatasetPlan plan_dataset(const DatasetSpec& spec) {
  if (spec.cases_male < 0 || spec.cases_female < 0 || spec.cases_male + spec.cases_female == 0) {
    throw Error("synth.bad_spec", "case counts must be non-negative with at least one case");
  }
  if (!(spec.abnormal_fraction >= 0.0 && spec.abnormal_fraction <= 1.0)) {
    throw Error("synth.bad_spec", "abnormal_fraction must lie in [0, 1]");
  }
  DatasetPlan plan;
  const int total_cases = spec.cases_male + spec.cases_female;
  for (int i = 0; i < total_cases; ++i) {
    CaseRecord rec;
    char buf[48];
    std::snprintf(buf, sizeof buf, "case%03d", i);
    rec.case_id = buf;
    rec.sex = i < spec.cases_male ? Sex::male : Sex::female;
    std::vector<int> labels;
    for (int c = 0; c < 22; ++c) labels.insert(labels.end(), {c, c});
    labels.push_back(kClassX);
    labels.push_back(rec.sex == Sex::male ? kClassY : kClassX);
    int copy_of[kNumClasses] = {};
    for (int label : labels) {
      std::snprintf(buf, sizeof buf, "%s_%02d_%d", rec.case_id.c_str(), label, copy_of[label]++);
      rec.chromosomes.push_back(buf);
      plan.instances.push_back({static_cast<std::size_t>(i), label, buf});
    }
    plan.cases.push_back(std::move(rec));
  }
  return plan;
}

SynthDataset generate_dataset(const DatasetSpec& spec) {
  auto plan = plan_dataset(spec);
  const auto& jobs = plan.instances;
  SynthDataset data;
  data.cases = std::move(plan.cases);

  std::vector<char> abnormal(jobs.size(), 0);
  const auto n_abnormal =
      static_cast<std::size_t>(std::llround(spec.abnormal_fraction * static_cast<double>(jobs.size())));
  {
    std::vector<std::size_t> idx(jobs.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(spec.seed, "abnormal"));
    rng.shuffle(idx.begin(), idx.end());
    for (std::size_t k = 0; k < n_abnormal; ++k) abnormal[idx[k]] = 1;
  }

  const auto& programs = standard_programs();
  data.instances.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto& job = jobs[j];
    const auto& rec = data.cases[job.case_index];
    const std::uint64_t case_seed = derive_seed(spec.seed, "case:" + rec.case_id);
    const std::uint64_t seed = derive_seed(case_seed, job.instance_id);
    BandProgram program = programs[static_cast<std::size_t>(job.class_label)];
    std::optional<Mutation> mutation;
    if (abnormal[j]) {
      Rng mrng(derive_seed(seed, "mutation"));
      mutation = random_mutation(program, mrng);
      program = mutate(program, *mutation);
    }
    auto inst = generate_chromosome(program, seed, spec.noise, rec.case_id, job.instance_id);
    inst.truth.mutation = mutation;
    data.instances[j] = std::move(inst);
  });
  return data;
}

std::filesystem::path write_dataset(const SynthDataset& data, const std::filesystem::path& dir, RasterFormat format,
                                    const nlohmann::json& stamp) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");
  const std::string ext = format == RasterFormat::pgm ? ".pgm" : ".png";
  std::vector<ManifestEntry> entries(data.instances.size());
  parallel_for(data.instances.size(), [&](std::size_t i) {
    const auto& inst = data.instances[i];
    ManifestEntry e;
    e.image_path = dir / "images" / (inst.image.instance_id + ext);
    e.mask_path = dir / "masks" / (inst.image.instance_id + "_mask" + ext);
    e.class_label = inst.image.class_label;
    e.case_id = inst.image.case_id;
    e.instance_id = inst.image.instance_id;
    save_chromosome(inst.image, e.image_path, e.mask_path);
    entries[i] = std::move(e);
  });
  const auto manifest = dir / "manifest.json";
  write_manifest(manifest, entries);

  nlohmann::json truth = stamp;
  truth["version"] = 1;
  nlohmann::json instances = nlohmann::json::object();
  for (const auto& inst : data.instances) {
    nlohmann::json j;
    j["bands"] = inst.truth.band_levels;
    j["base_class"] = inst.truth.base_class;
    j["tips"] = {{inst.truth.tips[0].row, inst.truth.tips[0].col}, {inst.truth.tips[1].row, inst.truth.tips[1].col}};
    if (inst.truth.mutation) j["mutation"] = to_json(*inst.truth.mutation);
    instances[inst.image.instance_id] = std::move(j);
  }
  truth["instances"] = std::move(instances);
  std::ofstream out(dir / "ground_truth.json");
  if (!out) throw Error("io.unwritable", "cannot write ground truth");
  out << truth.dump(1) << '\n';
  return manifest;
}

}  // namespace kseq
