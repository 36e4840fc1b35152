#pragma once

#include <cstdint>
#include <vector>

#include "saa/imaging.hpp"
#include "saa/mask_design.hpp"

namespace saa {

enum class ToyColor { red, green, blue };

/// Smooth gray gradient with faint per-pixel noise, already on the 8-bit lattice.
ImagePlane make_background(int height, int width, std::uint64_t seed);

/// Paints a flat `size` x `size` square of the given color whose center
/// pixel (rounded half-up) is `center`. Clipped to the image.
void plant_toy_object(ImagePlane& image, PixelCoord center, int size, ToyColor color);

struct SyntheticScene {
  ImagePlane image;
  std::vector<PixelCoord> object_centers;
  std::vector<ToyColor> colors;
};

/// Background plus `object_count` toy objects at well-separated random
/// positions, sized for detectors running at `native_dim`.
SyntheticScene make_synthetic_scene(int height, int width, int object_count, std::uint64_t seed,
                                    int native_dim = 128);

}  // namespace saa
