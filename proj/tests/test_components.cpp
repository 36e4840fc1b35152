#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "saa/components.hpp"

using namespace saa;

namespace {

BinaryMask from_rows(const std::vector<std::string>& rows) {
  BinaryMask mask(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int r = 0; r < mask.height(); ++r)
    for (int c = 0; c < mask.width(); ++c) mask.set(r, c, rows[r][c] == '#');
  return mask;
}

}  // namespace

TEST_CASE("diagonal neighbours join only under 8-connectivity") {
  const BinaryMask mask = from_rows({
      "#...",
      ".#..",
      "...#",
      "..##",
  });
  const ComponentReport eight = connected_components(mask, Connectivity::eight);
  CHECK(eight.component_sizes == std::vector<long>{2, 3});
  CHECK(eight.total == 5);
  const ComponentReport four = connected_components(mask, Connectivity::four);
  CHECK(four.component_sizes == std::vector<long>{1, 1, 3});
  CHECK(four.total == 5);
}

TEST_CASE("a U shape merges labels in the second pass") {
  const BinaryMask mask = from_rows({
      "#.#.#",
      "#.#.#",
      "#####",
  });
  CHECK(connected_components(mask, Connectivity::four).component_sizes == std::vector<long>{11});
}

TEST_CASE("empty and full masks") {
  CHECK(connected_components(BinaryMask(5, 5)).component_sizes.empty());
  BinaryMask full(3, 4);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) full.set(r, c, true);
  CHECK(connected_components(full).component_sizes == std::vector<long>{12});
}

TEST_CASE("labeling agrees with flood fill on random masks") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const double density = 0.1 + 0.8 * (trial % 10) / 10.0;
    const BinaryMask mask = oracle::random_mask(rng, 24, 31, density);
    for (int conn : {4, 8}) {
      const auto report = connected_components(mask, static_cast<Connectivity>(conn));
      CHECK(report.component_sizes == oracle::flood_components(mask, conn));
      CHECK(report.total == mask.popcount());
    }
  }
}
