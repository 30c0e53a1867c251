// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <map>

#include "kseq/error.hpp"
#include "kseq/synth.hpp"
#include "kseq/tokenizer.hpp"

using namespace kseq;

namespace {

std::map<int, int> class_counts(const DatasetPlan& plan) {
  std::map<int, int> out;
  for (const auto& i : plan.instances) ++out[i.class_label];
  return out;
}

int row_extent(const Mask& m) {
  int lo = m.rows(), hi = -1;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m(r, c)) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
  }
  return hi - lo + 1;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("palette and programs") {
    CHECK(palette_intensity(0) == 16);
    CHECK(palette_intensity(7) == 240);
    for (int k = 0; k < kPaletteSize; ++k) CHECK(palette_level(palette_intensity(k)) == k);
    const auto& programs = standard_programs();
    REQUIRE(programs.size() == 24);
    CHECK(programs[0].levels() == std::vector<int>{2, 0, 1, 2});
    for (std::size_t i = 0; i < programs.size(); ++i) {
      CHECK(programs[i].class_label == static_cast<int>(i));
      CHECK_NOTHROW(validate_program(programs[i]));
      const auto lv = programs[i].levels();
      CHECK(std::adjacent_find(lv.begin(), lv.end()) == lv.end());
    }
  }

  TEST_CASE("dataset plans reproduce the case tables") {
    const auto a = plan_dataset({32, 33});
    CHECK(a.instances.size() == 2990);
    CHECK(a.cases.size() == 65);
    const auto ca = class_counts(a);
    for (int c = 0; c < 22; ++c) CHECK(ca.at(c) == 130);
    CHECK(ca.at(22) == 98);
    CHECK(ca.at(23) == 32);

    const auto b = plan_dataset({256, 324});
    CHECK(b.instances.size() == 26680);
    const auto cb = class_counts(b);
    for (int c = 0; c < 22; ++c) CHECK(cb.at(c) == 1160);
    CHECK(cb.at(22) == 904);
    CHECK(cb.at(23) == 256);

    DatasetSpec single;
    single.cases_male = 1;
    single.cases_female = 0;
    const auto one = generate_dataset(single);
    CHECK(one.instances.size() == 46);
    CHECK(std::count_if(one.instances.begin(), one.instances.end(),
                        [](const auto& i) { return i.image.class_label == 23; }) == 1);

    CHECK_THROWS_AS(plan_dataset({0, 0}), Error);
    CHECK_THROWS_AS(plan_dataset({-1, 3}), Error);
  }

  TEST_CASE("generation is deterministic") {
    const NoiseSpec noise{8.0, 0.1, 0.5};
    for (int i = 0; i < 6; ++i) {
      const auto& p = standard_programs()[static_cast<std::size_t>(i * 4)];
      const auto a = generate_chromosome(p, 42 + i, noise);
      const auto b = generate_chromosome(p, 42 + i, noise);
      CHECK(a.image.pixels == b.image.pixels);
      CHECK(a.image.mask == b.image.mask);
      CHECK(a.truth.tips == b.truth.tips);
      CHECK(a.image.pixels.rows() % 8 == 0);
      CHECK(a.image.pixels.cols() % 8 == 0);
    }
    DatasetSpec spec;
    spec.cases_male = 1;
    spec.cases_female = 1;
    spec.abnormal_fraction = 0.3;
    const auto d1 = generate_dataset(spec), d2 = generate_dataset(spec);
    REQUIRE(d1.instances.size() == d2.instances.size());
    for (std::size_t i = 0; i < d1.instances.size(); ++i) {
      CHECK(d1.instances[i].image.pixels == d2.instances[i].image.pixels);
      CHECK(d1.instances[i].truth.band_levels == d2.instances[i].truth.band_levels);
    }
  }

  TEST_CASE("straight length stays within the jitter bounds") {
    const double j = 0.1;
    for (int i = 0; i < 24; ++i) {
      const auto& p = standard_programs()[static_cast<std::size_t>(i)];
      for (std::uint64_t s = 0; s < 3; ++s) {
        const auto g = generate_chromosome(p, s * 31 + static_cast<std::uint64_t>(i), {0.0, j, 0.0});
        const int ext = row_extent(g.image.mask);
        CHECK(ext >= static_cast<int>(p.base_length * (1.0 - j)) - 1);
        CHECK(ext <= static_cast<int>(p.base_length * (1.0 + j)) + 1);
      }
    }
  }

  TEST_CASE("mutation examples") {
    const auto& p0 = standard_programs()[0];
    const Mutation insert{MutationKind::band_insertion, 3, Band{palette_intensity(0), 0.2}, 1};
    CHECK(mutate(p0, insert).levels() == std::vector<int>{2, 0, 1, 0, 2});

    for (int site = 0; site < 4; ++site) {
      CHECK(mutate(p0, {MutationKind::band_inversion, site, std::nullopt, 1}).bands == p0.bands);
    }
    const auto& p5 = standard_programs()[5];
    for (int site = 0; site < static_cast<int>(p5.bands.size()); ++site) {
      const Band removed = p5.bands[static_cast<std::size_t>(site)];
      const auto del = mutate(p5, {MutationKind::band_deletion, site, std::nullopt, 1});
      const auto back = mutate(del, {MutationKind::band_insertion, site, removed, 1});
      REQUIRE(back.bands.size() == p5.bands.size());
      for (std::size_t k = 0; k < back.bands.size(); ++k) {
        CHECK(back.bands[k].intensity == p5.bands[k].intensity);
        CHECK(std::abs(back.bands[k].length_fraction - p5.bands[k].length_fraction) < 1e-9);
      }
    }
    const auto inv = mutate(p5, {MutationKind::band_inversion, 1, std::nullopt, 3});
    CHECK(inv.bands[1] == p5.bands[3]);
    CHECK(inv.bands[3] == p5.bands[1]);

    BandProgram two = p0;
    two.bands = {{16, 0.5}, {48, 0.5}};
    CHECK_THROWS_WITH_AS(mutate(two, {MutationKind::band_deletion, 0, std::nullopt, 1}),
                         doctest::Contains("fewer than two"), Error);
    CHECK_THROWS_AS(mutate(p0, {MutationKind::band_insertion, 9, Band{16, 0.2}, 1}), Error);
    CHECK_THROWS_AS(mutate(p0, {MutationKind::band_insertion, 1, std::nullopt, 1}), Error);
    CHECK_THROWS_AS(mutate(p0, {MutationKind::band_inversion, 3, std::nullopt, 2}), Error);
  }

  TEST_CASE("random mutations change the band sequence once") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const auto& p = standard_programs()[rng.below(24)];
      const auto m = random_mutation(p, rng);
      const auto q = mutate(p, m);
      auto lv = q.levels();
      CHECK(std::adjacent_find(lv.begin(), lv.end()) == lv.end());
      auto canon = [](std::vector<int> v) {
        if (canonical_orientation(v) == Orientation::reversed) std::reverse(v.begin(), v.end());
        return v;
      };
      CHECK(canon(lv) != canon(p.levels()));
      const int dn = static_cast<int>(q.bands.size()) - static_cast<int>(p.bands.size());
      switch (m.kind) {
        case MutationKind::band_insertion: CHECK(dn == 1); break;
        case MutationKind::band_deletion: CHECK(dn == -1); break;
        case MutationKind::band_inversion: CHECK(dn == 0); CHECK(m.span >= 2); break;
      }
    }
  }

  TEST_CASE("abnormal datasets carry exactly one mutation per flagged instance") {
    DatasetSpec spec;
    spec.cases_male = 1;
    spec.cases_female = 1;
    spec.abnormal_fraction = 0.5;
    const auto data = generate_dataset(spec);
    int flagged = 0;
    for (const auto& inst : data.instances) {
      const auto& base = standard_programs()[static_cast<std::size_t>(inst.truth.base_class)];
      const auto& lv = inst.truth.band_levels;
      CHECK(std::adjacent_find(lv.begin(), lv.end()) == lv.end());
      if (inst.truth.mutation) {
        ++flagged;
        CHECK(mutate(base, *inst.truth.mutation).levels() == lv);
      } else {
        CHECK(lv == base.levels());
      }
    }
    CHECK(flagged == 46);
  }

  TEST_CASE("degenerate geometry is rejected") {
    BandProgram tiny = standard_programs()[0];
    tiny.base_length = 20;
    CHECK_THROWS_AS(generate_chromosome(tiny, 1, {}), Error);
    BandProgram bad = standard_programs()[0];
    bad.bands[0].length_fraction += 0.1;
    CHECK_THROWS_AS(validate_program(bad), Error);
  }

  TEST_CASE("mutation json") {
    const auto j = to_json(Mutation{MutationKind::band_inversion, 2, std::nullopt, 3});
    CHECK(j.at("kind") == "band_inversion");
    CHECK(j.at("site") == 2);
    CHECK(j.at("span") == 3);
  }
}
