#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tawl/compositor.hpp"

using namespace tawl;

TEST_CASE("compose uniform maps") {
  std::mt19937 rng(1);
  const Frame input = oracle::random_frame(rng, 12, 9, 3);
  const Frame background = oracle::random_frame(rng, 12, 9, 3);
  CHECK(compose(input, background, ClassMap(12, 9, 1, Label::Background)) == background);
  CHECK(compose(input, background, ClassMap(12, 9, 1, Label::Object)) == input);
  CHECK(compose(input, background, ClassMap(12, 9, 1, Label::Rain)) == background);
}

TEST_CASE("compose sources all channels of a pixel together") {
  Frame input(2, 1, 3, 10);
  Frame background(2, 1, 3, 200);
  ClassMap map(2, 1);
  map(0, 0) = Label::Rain;
  map(1, 0) = Label::Object;
  const Frame out = compose(input, background, map);
  for (int c = 0; c < 3; ++c) {
    CHECK(out(0, 0, c) == 200);
    CHECK(out(1, 0, c) == 10);
  }
}

TEST_CASE("compose properties on random inputs") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int channels = trial % 2 ? 3 : 1;
    const Frame input = oracle::random_frame(rng, 16, 11, channels);
    const Frame background = oracle::random_frame(rng, 16, 11, channels);
    const ClassMap map = oracle::random_classmap(rng, 16, 11, 0.3, 0.3);
    const Frame out = compose(input, background, map);
    CHECK(out == oracle::compose(input, background, map));
    CHECK(compose(out, background, map) == out);
    CHECK(compose(input, input, map) == input);
    for (int y = 0; y < 11; ++y) {
      for (int x = 0; x < 16; ++x) {
        bool from_input = true, from_background = true;
        for (int c = 0; c < channels; ++c) {
          from_input &= out(x, y, c) == input(x, y, c);
          from_background &= out(x, y, c) == background(x, y, c);
        }
        CHECK((from_input || from_background));
      }
    }
  }
}

TEST_CASE("compose shape errors") {
  CHECK_THROWS_AS(compose(Frame(4, 4, 3), Frame(4, 4, 1), ClassMap(4, 4)), ShapeError);
  CHECK_THROWS_AS(compose(Frame(4, 4, 1), Frame(4, 4, 1), ClassMap(4, 5)), ShapeError);
}
