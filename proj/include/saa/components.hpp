#pragma once

#include <vector>

#include "saa/imaging.hpp"

namespace saa {

enum class Connectivity { four = 4, eight = 8 };

struct ComponentReport {
  Connectivity connectivity = Connectivity::eight;
  std::vector<long> component_sizes;  // in order of first raster-scan pixel
  long total = 0;
};

/// Two-pass union-find labeling of the mask's 1-pixels.
ComponentReport connected_components(const BinaryMask& mask,
                                     Connectivity connectivity = Connectivity::eight);

}  // namespace saa
