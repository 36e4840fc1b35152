#include "saa/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "saa/toy_detectors.hpp"

namespace saa {

ImagePlane make_background(int height, int width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> base(0.35, 0.65);
  std::uniform_real_distribution<double> tilt(-0.15, 0.15);
  std::uniform_int_distribution<int> jitter(-2, 2);
  const double level = base(rng);
  const double row_tilt = tilt(rng);
  const double col_tilt = tilt(rng);
  ImagePlane image(height, width, 3);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double gray = level + row_tilt * (r / double(height) - 0.5) +
                          col_tilt * (c / double(width) - 0.5);
      const int byte = static_cast<int>(std::lround(gray * 255.0));
      for (int ch = 0; ch < 3; ++ch) {
        image.at(r, c, ch) = std::clamp(byte + jitter(rng), 0, 255) / 255.0;
      }
    }
  }
  return image;
}

void plant_toy_object(ImagePlane& image, PixelCoord center, int size, ToyColor color) {
  const int top = center.row - size / 2;
  const int left = center.col - size / 2;
  const int lit = static_cast<int>(color);
  for (int r = std::max(0, top); r < std::min(image.height(), top + size); ++r) {
    for (int c = std::max(0, left); c < std::min(image.width(), left + size); ++c) {
      for (int ch = 0; ch < image.channels(); ++ch) image.at(r, c, ch) = ch == lit ? 1.0 : 0.0;
    }
  }
}

SyntheticScene make_synthetic_scene(int height, int width, int object_count, std::uint64_t seed,
                                    int native_dim) {
  SyntheticScene scene;
  scene.image = make_background(height, width, seed);
  const int size = toy_object_size(std::min(height, width), native_dim);
  const int margin = size / 2 + size / 4;
  const double separation = 2.5 * size;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> rows(margin, height - 1 - margin);
  std::uniform_int_distribution<int> cols(margin, width - 1 - margin);
  std::uniform_int_distribution<int> colors(0, 2);
  // Rejection sampling with restarts so an unlucky early placement cannot
  // block the rest.
  for (int restart = 0; static_cast<int>(scene.object_centers.size()) < object_count; ++restart) {
    if (restart > 200) throw std::invalid_argument("cannot place that many toy objects");
    scene.object_centers.clear();
    scene.colors.clear();
    for (int attempt = 0; attempt < 2000 && static_cast<int>(scene.object_centers.size()) < object_count;
         ++attempt) {
      const PixelCoord p{rows(rng), cols(rng)};
      const bool clear = std::all_of(scene.object_centers.begin(), scene.object_centers.end(),
                                     [&](const PixelCoord& q) {
                                       return std::hypot(p.row - q.row, p.col - q.col) >= separation;
                                     });
      if (!clear) continue;
      scene.object_centers.push_back(p);
      scene.colors.push_back(static_cast<ToyColor>(colors(rng)));
    }
  }
  for (std::size_t i = 0; i < scene.object_centers.size(); ++i) {
    plant_toy_object(scene.image, scene.object_centers[i], size, scene.colors[i]);
  }
  return scene;
}

}  // namespace saa
