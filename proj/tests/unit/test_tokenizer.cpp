// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kseq/error.hpp"
#include "kseq/tokenizer.hpp"
#include "vocab.hpp"

using namespace kseq;

namespace {

const NoiseSpec kClean{0.0, 0.0, 0.0};

std::vector<int> interior_of(const BandProgram& p, std::uint64_t seed, const NoiseSpec& noise = kClean) {
  const auto s = generate_chromosome(p, seed, noise);
  return tokenize(s.image, testing::small_vocabulary(), TokenizerParams{}).interior_vec();
}

}  // namespace

TEST_SUITE("tokenizer") {
  TEST_CASE("canonical orientation") {
    CHECK(canonical_orientation(std::vector<int>{2, 0, 1, 2}) == Orientation::forward);
    CHECK(canonical_orientation(std::vector<int>{2, 1, 0, 2}) == Orientation::reversed);
    CHECK(canonical_orientation(std::vector<int>{1, 0, 1}) == Orientation::forward);
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<int> v(1 + rng.below(7));
      for (auto& x : v) x = static_cast<int>(rng.below(4));
      auto canon = [](std::vector<int> s) {
        if (canonical_orientation(s) == Orientation::reversed) std::reverse(s.begin(), s.end());
        return s;
      };
      std::vector<int> r(v.rbegin(), v.rend());
      CHECK(canon(v) == canon(r));
    }
  }

  TEST_CASE("vocabulary tokens follow the palette levels") {
    const auto& m = testing::small_vocabulary();
    REQUIRE(m.K == 8);
    for (std::size_t k = 0; k < m.K; ++k) {
      const auto c = m.centroid(k);
      CHECK(std::max_element(c.begin(), c.begin() + 8) - c.begin() == static_cast<long>(k));
    }
  }

  TEST_CASE("class-0 chromosome tokenizes to 2-0-1-2; with an extra band 0, to 2-0-1-0-2") {
    const auto& p0 = standard_programs()[0];
    CHECK(interior_of(p0, 1) == std::vector<int>{2, 0, 1, 2});
    const Mutation extra{MutationKind::band_insertion, 3, Band{palette_intensity(0), 0.2}, 1};
    CHECK(interior_of(mutate(p0, extra), 1) == std::vector<int>{2, 0, 1, 0, 2});
  }

  TEST_CASE("bands of at least 3 patches are each recovered exactly once") {
    int covered = 0;
    for (const auto& p : standard_programs()) {
      double shortest = p.base_length;
      for (const auto& b : p.bands) shortest = std::min(shortest, b.length_fraction * p.base_length);
      if (shortest < 24.0) continue;
      ++covered;
      auto levels = p.levels();
      if (canonical_orientation(levels) == Orientation::reversed) std::reverse(levels.begin(), levels.end());
      CHECK(interior_of(p, 3) == levels);
    }
    MESSAGE("programs with every band >= 3 patches: " << covered);
    CHECK(covered > 0);
  }

  TEST_CASE("rotation and translation invariance") {
    const auto& model = testing::small_vocabulary();
    const auto& programs = standard_programs();
    for (int i = 0; i < 24; ++i) {
      const auto s = generate_chromosome(programs[static_cast<std::size_t>(i)], 300 + i, {8.0, 0.1, 0.5});
      const auto a = tokenize(s.image, model, {});
      const auto b = tokenize(testing::rotate180(s.image), model, {});
      CHECK(a.tokens == b.tokens);

      const auto& img = s.image;
      Raster px(img.pixels.rows() + 8, img.pixels.cols() + 16, 255);
      Mask m(px.rows(), px.cols(), 0);
      for (int r = 0; r < img.pixels.rows(); ++r) {
        for (int c = 0; c < img.pixels.cols(); ++c) {
          px(r + 8, c + 16) = img.pixels(r, c);
          m(r + 8, c + 16) = img.mask(r, c);
        }
      }
      const auto t = tokenize(make_chromosome(px, m, i, "c", "t"), model, {});
      CHECK(t.tokens == a.tokens);
      CHECK(t.positions == a.positions);
    }
  }

  TEST_CASE("pipeline output invariants") {
    const auto& model = testing::small_vocabulary();
    for (int i = 0; i < 48; ++i) {
      const auto s = generate_chromosome(standard_programs()[static_cast<std::size_t>(i % 24)], 900 + i,
                                         {12.0, 0.1, 0.5});
      const auto t = tokenize_detailed(s.image, model, {});
      CHECK_NOTHROW(validate_sequence(t.sequence));
      CHECK(t.sequence.interior().size() <= t.grid.patches.size());
      CHECK(t.sequence.tokens.front() == kSoc);
      CHECK(t.sequence.tokens.back() == kEoc);
      CHECK(std::count(t.sequence.tokens.begin(), t.sequence.tokens.end(), kSoc) == 1);
      CHECK(std::count(t.sequence.tokens.begin(), t.sequence.tokens.end(), kEoc) == 1);
      CHECK(t.sequence.spans.front().first == 0.0);
      CHECK(t.sequence.spans.back().second == doctest::Approx(t.axis.length()));
    }
  }

  TEST_CASE("min_run drops short runs") {
    const auto s = generate_chromosome(standard_programs()[0], 1, kClean);
    TokenizerParams p;
    p.min_run = 1000;
    CHECK_THROWS_AS(tokenize(s.image, testing::small_vocabulary(), p), Error);
    p.min_run = 2;
    CHECK(tokenize(s.image, testing::small_vocabulary(), p).interior_vec() == std::vector<int>{2, 0, 1, 2});
  }

  TEST_CASE("imported features take the place of the built-in extractor") {
    const auto s = generate_chromosome(standard_programs()[5], 2, kClean);
    const auto grid = extract_patches(s.image, 8, 0.3);
    const auto f = banding_features(s.image, grid);
    const auto& model = testing::small_vocabulary();
    CHECK(tokenize(s.image, model, {}, &f).tokens == tokenize(s.image, model, {}).tokens);
    const FeatureMatrix wrong(f.rows() + 1, f.dim());
    CHECK_THROWS_AS(tokenize(s.image, model, {}, &wrong), Error);
  }

  TEST_CASE("positional encoding") {
    const auto z = positional_encoding(0.0, 6);
    CHECK(z == std::vector<double>{0, 1, 0, 1, 0, 1});
    const auto a = positional_encoding(0.1, 8), b = positional_encoding(0.9, 8);
    double diff = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::abs(a[i]) <= 1.0);
      diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    CHECK(diff > 1e-3);
    CHECK(a[0] == doctest::Approx(std::sin(10.0)));
    CHECK(a[3] == doctest::Approx(std::cos(10.0 / std::pow(10000.0, 2.0 / 8.0))));
    CHECK_THROWS_AS(positional_encoding(0.5, 5), Error);
    CHECK_THROWS_AS(positional_encoding(0.5, 0), Error);
  }

  TEST_CASE("encode") {
    const auto& model = testing::small_vocabulary();
    const auto one = encode(make_sequence({3}), model, 4);
    REQUIRE(one.vectors.size() == 1);
    CHECK(one.vectors[0].size() == model.dim + 4);
    const auto a = encode(make_sequence({1, 4}, "a", {0.2, 0.6}), model, 4);
    const auto b = encode(make_sequence({1, 4}, "b", {0.3, 0.7}), model, 4);
    const auto d = static_cast<long>(model.dim);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::equal(a.vectors[i].begin(), a.vectors[i].begin() + d, b.vectors[i].begin()));
      CHECK_FALSE(std::equal(a.vectors[i].begin() + d, a.vectors[i].end(), b.vectors[i].begin() + d));
    }
    CHECK_THROWS_AS(encode(make_sequence({8}), model, 4), Error);
  }

  TEST_CASE("sequence validation") {
    CHECK_THROWS_AS(make_sequence({1, 1}), Error);
    CHECK_THROWS_AS(make_sequence({1, 2}, "x", {0.6, 0.4}), Error);
    CHECK_THROWS_AS(make_sequence({1, 2}, "x", {0.0, 0.4}), Error);
    TokenSequence bad = make_sequence({1, 2});
    bad.tokens.front() = 0;
    CHECK_THROWS_AS(validate_sequence(bad), Error);
  }

  TEST_CASE("token dump lines round trip") {
    const auto s = make_sequence({2, 0, 1, 2}, "case000_00_0", {0.1, 0.35, 0.6200000000000001, 0.9});
    const auto line = format_token_line(s);
    CHECK(line == "case000_00_0\tS 2 0 1 2 E\t0.1,0.35,0.6200000000000001,0.9");
    const auto back = parse_token_line(line);
    CHECK(back.tokens == s.tokens);
    CHECK(back.positions == s.positions);
    CHECK(back.source == s.source);
    CHECK_THROWS_AS(parse_token_line("id\t2 0 E\t0.5"), Error);
    CHECK_THROWS_AS(parse_token_line("id S 2 E 0.5"), Error);
    CHECK_THROWS_AS(parse_token_line("id\tS x E\t0.5"), Error);
  }
}
