#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tawl/streak_filters.hpp"

using namespace tawl;

namespace {

ClassMap row_with_run(int width, int start, int length) {
  ClassMap map(width, 1, 1, Label::Background);
  for (int x = start; x < start + length; ++x) map(x, 0) = Label::Rain;
  return map;
}

}  // namespace

TEST_CASE("width and radius thresholds") {
  CHECK(width_threshold(100) == 5);
  CHECK(width_threshold(320) == 16);
  CHECK(width_threshold(640) == 32);
  CHECK(width_threshold(10) == 1);  // round_half_up(0.5)
  CHECK(width_threshold(1) == 1);
  CHECK(location_radius(320) == 3);
  CHECK(location_radius(640) == 6);
  CHECK(location_radius(64) == 1);
  CHECK(location_radius(100) == 1);
  CHECK_THROWS_AS(width_threshold(100, 0.0), ConfigError);
}

TEST_CASE("width_filter boundary is strict") {
  const int w_max = width_threshold(100);
  SUBCASE("run of four stays rain") {
    const ClassMap out = width_filter(row_with_run(100, 10, 4), w_max);
    for (int x = 10; x < 14; ++x) CHECK(out(x, 0) == Label::Rain);
  }
  SUBCASE("run of five becomes object") {
    const ClassMap out = width_filter(row_with_run(100, 10, 5), w_max);
    for (int x = 10; x < 15; ++x) CHECK(out(x, 0) == Label::Object);
    CHECK(out(9, 0) == Label::Background);
    CHECK(out(15, 0) == Label::Background);
  }
  SUBCASE("runs are maximal and stop at object pixels") {
    ClassMap map = row_with_run(100, 0, 8);
    map(4, 0) = Label::Object;  // splits into runs of 4 and 3
    const ClassMap out = width_filter(map, w_max);
    CHECK(out == map);
  }
  SUBCASE("runs touching the right edge") {
    const ClassMap out = width_filter(row_with_run(100, 95, 5), w_max);
    CHECK(out(99, 0) == Label::Object);
  }
}

TEST_CASE("width_filter matches the row-scan oracle") {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const ClassMap map = oracle::random_classmap(rng, 64, 64, 0.6, 0.1);
    const int w_max = 1 + trial % 8;
    REQUIRE(width_filter(map, w_max) == oracle::width_filter(map, w_max));
  }
}

TEST_CASE("connected components") {
  SUBCASE("empty mask") {
    const auto cc = connected_components(BinaryMask(7, 5));
    CHECK(cc.count == 0);
    for (auto id : cc.ids.samples()) CHECK(id == 0);
  }
  SUBCASE("diagonal neighbours join") {
    BinaryMask mask(4, 4);
    mask(1, 1) = 1;
    mask(2, 2) = 1;
    const auto cc = connected_components(mask);
    CHECK(cc.count == 1);
    CHECK(cc.ids(1, 1) == cc.ids(2, 2));
  }
  SUBCASE("U shape merges late") {
    BinaryMask mask(5, 3);
    for (int y = 0; y < 3; ++y) {
      mask(0, y) = 1;
      mask(4, y) = 1;
    }
    for (int x = 0; x < 5; ++x) mask(x, 2) = 1;
    const auto cc = connected_components(mask);
    CHECK(cc.count == 1);
  }
  SUBCASE("random masks agree with flood fill") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
      const BinaryMask mask = oracle::random_mask(rng, 32, 32, 0.15 + 0.005 * trial);
      const auto cc = connected_components(mask);
      const auto expected = oracle::flood_fill(mask);
      REQUIRE(cc.ids == expected);
      std::int32_t max_id = 0;
      for (auto id : expected.samples()) max_id = std::max(max_id, id);
      REQUIRE(cc.count == max_id);
    }
  }
}

TEST_CASE("chebyshev dilation matches the definition") {
  std::mt19937 rng(31);
  for (int radius : {0, 1, 3, 7}) {
    const BinaryMask mask = oracle::random_mask(rng, 30, 20, 0.02);
    const BinaryMask out = chebyshev_dilate(mask, radius);
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x < 30; ++x) {
        bool near = false;
        for (int v = 0; v < 20; ++v) {
          for (int u = 0; u < 30; ++u) {
            if (mask(u, v) && std::max(std::abs(u - x), std::abs(v - y)) <= radius) near = true;
          }
        }
        REQUIRE(out(x, y) == (near ? 1 : 0));
      }
    }
  }
}

TEST_CASE("location_filter pinned cases") {
  SUBCASE("isolated rain pixel beyond the radius stays rain") {
    ClassMap map(20, 20, 1, Label::Background);
    map(5, 5) = Label::Rain;
    map(10, 5) = Label::Object;  // Chebyshev distance 5
    const ClassMap out = location_filter(map, 3);
    CHECK(out(5, 5) == Label::Rain);
  }
  SUBCASE("rain 8-adjacent to an object joins it") {
    ClassMap map(20, 20, 1, Label::Background);
    map(5, 5) = Label::Rain;
    map(6, 6) = Label::Object;
    CHECK(location_filter(map, 3)(5, 5) == Label::Object);
  }
  SUBCASE("a whole component flips when one pixel is near") {
    ClassMap map(30, 5, 1, Label::Background);
    for (int x = 2; x < 20; ++x) map(x, 2) = Label::Rain;
    map(22, 2) = Label::Object;  // distance 3 from the run's last pixel
    const ClassMap out = location_filter(map, 3);
    for (int x = 2; x < 20; ++x) CHECK(out(x, 2) == Label::Object);
  }
}

TEST_CASE("location_filter matches the exhaustive distance oracle") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const ClassMap map = oracle::random_classmap(rng, 64, 64, 0.05 + 0.002 * trial, 0.002);
    const int radius = 1 + trial % 4;
    const ClassMap out = location_filter(map, radius);
    REQUIRE(out == oracle::location_filter(map, radius));
  }
}

TEST_CASE("filters only move labels from rain to object") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const ClassMap map = oracle::random_classmap(rng, 48, 40, 0.3, 0.05);
    const ClassMap after = location_filter(width_filter(map, 4), 2);
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (map[i] != Label::Rain) {
        REQUIRE(after[i] == map[i]);
      } else {
        REQUIRE(after[i] != Label::Background);
      }
    }
    // Components are never split.
    const auto cc = connected_components(label_mask(width_filter(map, 4), Label::Rain));
    std::vector<int> seen(static_cast<std::size_t>(cc.count) + 1, -1);
    for (std::size_t i = 0; i < after.size(); ++i) {
      const auto id = cc.ids[i];
      if (id == 0) continue;
      const int label = static_cast<int>(after[i]);
      if (seen[id] < 0) seen[id] = label;
      REQUIRE(seen[id] == label);
    }
  }
}

TEST_CASE("filter idempotence") {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const ClassMap map = oracle::random_classmap(rng, 64, 64, 0.4, 0.01);
    const ClassMap once = width_filter(map, 5);
    CHECK(width_filter(once, 5) == once);

    // Repeated location passes only grow the object set and settle.
    ClassMap current = location_filter(map, 2);
    const std::size_t components = connected_components(label_mask(map, Label::Rain)).count;
    std::size_t passes = 1;
    for (; passes <= components + 1; ++passes) {
      ClassMap next = location_filter(current, 2);
      for (std::size_t i = 0; i < next.size(); ++i) {
        if (current[i] == Label::Object) REQUIRE(next[i] == Label::Object);
      }
      if (next == current) break;
      current = std::move(next);
    }
    CHECK(passes <= components + 1);
  }
}

TEST_CASE("width_filter is resolution invariant under 2x upscaling") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const ClassMap map = oracle::random_classmap(rng, 32, 24, 0.6, 0.1);
    ClassMap big(64, 48);
    for (int y = 0; y < 48; ++y) {
      for (int x = 0; x < 64; ++x) big(x, y) = map(x / 2, y / 2);
    }
    const int w = 1 + trial % 6;
    const ClassMap small_out = width_filter(map, w);
    const ClassMap big_out = width_filter(big, 2 * w);
    for (int y = 0; y < 48; ++y) {
      for (int x = 0; x < 64; ++x) REQUIRE(big_out(x, y) == small_out(x / 2, y / 2));
    }
  }
}
