// SPDX-License-Identifier: Apache-2.0
#include "kseq/chromosome.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "kseq/error.hpp"
#include "kseq/raster_io.hpp"
#include "kseq/rng.hpp"

namespace kseq {

ChromosomeImage make_chromosome(Raster pixels, Mask mask, std::optional<int> class_label,
                                std::string case_id, std::string instance_id) {
  if (pixels.rows() < 1 || pixels.cols() < 1) {
    throw Error("chromo.empty_raster", "raster must be at least 1x1");
  }
  if (!pixels.same_shape(mask)) {
    throw Error("chromo.dimension_mismatch",
                "raster is " + std::to_string(pixels.rows()) + "x" + std::to_string(pixels.cols()) +
                    " but mask is " + std::to_string(mask.rows()) + "x" +
                    std::to_string(mask.cols()));
  }
  if (class_label && (*class_label < 0 || *class_label >= kNumClasses)) {
    throw Error("chromo.bad_label", "class label out of range: " + std::to_string(*class_label));
  }
  for (auto& v : mask.data()) v = v != 0 ? 1 : 0;
  if (count_foreground(mask) == 0) {
    throw Error("chromo.empty_foreground", "mask has no foreground pixels");
  }
  return ChromosomeImage{std::move(pixels), std::move(mask), class_label, std::move(case_id),
                         std::move(instance_id)};
}

Mask threshold_mask(const Raster& pixels) {
  Mask mask(pixels.rows(), pixels.cols());
  auto src = pixels.data();
  auto dst = mask.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] < 255 ? 1 : 0;
  return mask;
}

ChromosomeImage load_chromosome(const std::filesystem::path& image_path,
                                const std::optional<std::filesystem::path>& mask_path,
                                std::optional<int> class_label, std::string case_id,
                                std::string instance_id) {
  Raster pixels = read_raster(image_path);
  Mask mask = mask_path ? read_raster(*mask_path) : threshold_mask(pixels);
  if (instance_id.empty()) instance_id = image_path.stem().string();
  return make_chromosome(std::move(pixels), std::move(mask), class_label, std::move(case_id),
                         std::move(instance_id));
}

void save_chromosome(const ChromosomeImage& image, const std::filesystem::path& image_path,
                     const std::optional<std::filesystem::path>& mask_path) {
  write_raster(image_path, image.pixels);
  if (mask_path) {
    Raster stored(image.mask.rows(), image.mask.cols());
    auto src = image.mask.data();
    auto dst = stored.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 255 : 0;
    write_raster(*mask_path, stored);
  }
}

DatasetSplit stratified_split(std::span<const std::pair<std::string, int>> labeled,
                              std::pair<int, int> ratio, std::uint64_t seed) {
  if (ratio.first <= 0 || ratio.second <= 0) {
    throw Error("chromo.bad_ratio", "split ratio components must be positive");
  }
  std::map<int, std::vector<std::string>> by_class;
  for (const auto& [id, label] : labeled) by_class[label].push_back(id);

  DatasetSplit split;
  split.ratio = ratio;
  const double test_share = static_cast<double>(ratio.second) / (ratio.first + ratio.second);
  for (auto& [label, ids] : by_class) {
    if (ids.size() < 2) {
      throw Error("chromo.class_too_small",
                  "class " + std::to_string(label) + " has fewer than 2 instances");
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw Error("chromo.duplicate_id", "duplicate instance id in class " + std::to_string(label));
    }
    Rng rng(derive_seed(seed, "split:" + std::to_string(label)));
    rng.shuffle(ids.begin(), ids.end());
    auto n_test = static_cast<std::size_t>(std::llround(test_share * static_cast<double>(ids.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, ids.size() - 1);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < n_test ? split.test_ids : split.train_ids).insert(ids[i]);
    }
  }
  return split;
}

DatasetSplit stratified_split(std::span<const ChromosomeImage> dataset, std::pair<int, int> ratio,
                              std::uint64_t seed) {
  std::vector<std::pair<std::string, int>> labeled;
  labeled.reserve(dataset.size());
  for (const auto& img : dataset) {
    if (!img.class_label) {
      throw Error("chromo.missing_label", "instance " + img.instance_id + " has no class label");
    }
    labeled.emplace_back(img.instance_id, *img.class_label);
  }
  return stratified_split(labeled, ratio, seed);
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io.unreadable", "cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("io.malformed", "manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw Error("io.malformed", "manifest must be a JSON array");
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  std::vector<ManifestEntry> entries;
  entries.reserve(doc.size());
  for (const auto& item : doc) {
    ManifestEntry e;
    e.image_path = resolve(item.at("image_path").get<std::string>());
    if (item.contains("mask_path") && !item["mask_path"].is_null()) {
      e.mask_path = resolve(item["mask_path"].get<std::string>());
    }
    if (item.contains("class_label") && !item["class_label"].is_null()) {
      e.class_label = item["class_label"].get<int>();
    }
    e.case_id = item.value("case_id", std::string{});
    e.instance_id = item.value("instance_id", e.image_path.stem().string());
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
  const auto base = path.parent_path();
  auto rel = [&](const std::filesystem::path& p) {
    auto r = base.empty() ? p : p.lexically_relative(base);
    return (r.empty() ? p : r).generic_string();
  };
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json item;
    item["image_path"] = rel(e.image_path);
    if (e.mask_path) item["mask_path"] = rel(*e.mask_path);
    if (e.class_label) item["class_label"] = *e.class_label;
    item["case_id"] = e.case_id;
    item["instance_id"] = e.instance_id;
    doc.push_back(std::move(item));
  }
  std::ofstream out(path);
  if (!out) throw Error("io.unwritable", "cannot write manifest " + path.string());
  out << doc.dump(1) << '\n';
}

ChromosomeImage load_entry(const ManifestEntry& entry) {
  return load_chromosome(entry.image_path, entry.mask_path, entry.class_label, entry.case_id,
                         entry.instance_id);
}

}  // namespace kseq
