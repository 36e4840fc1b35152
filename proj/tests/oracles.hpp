#pragma once

// Straightforward reference implementations used to cross-check the library.
// They favour obviousness over speed and share no code with src/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "saa/detector.hpp"
#include "saa/imaging.hpp"
#include "saa/mask_design.hpp"

namespace oracle {

// Per-pixel composition straight from the definition.
inline saa::ImagePlane compose(const saa::ImagePlane& image, const saa::ImagePlane& patch,
                               const saa::BinaryMask& mask) {
  saa::ImagePlane out(image.height(), image.width(), image.channels());
  for (int r = 0; r < image.height(); ++r)
    for (int c = 0; c < image.width(); ++c)
      for (int ch = 0; ch < image.channels(); ++ch) {
        const double m = mask.at(r, c);
        out.at(r, c, ch) = image.at(r, c, ch) * (1.0 - m) + patch.at(r, c, ch) * m;
      }
  return out;
}

// Bilinear sample at a continuous source coordinate, clamped at the border.
inline double sample(const saa::ImagePlane& img, double y, double x, int ch) {
  y = std::clamp(y, 0.0, img.height() - 1.0);
  x = std::clamp(x, 0.0, img.width() - 1.0);
  const int y0 = static_cast<int>(std::floor(y));
  const int x0 = static_cast<int>(std::floor(x));
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const double fy = y - y0;
  const double fx = x - x0;
  const double top = img.at(y0, x0, ch) * (1 - fx) + img.at(y0, x1, ch) * fx;
  const double bottom = img.at(y1, x0, ch) * (1 - fx) + img.at(y1, x1, ch) * fx;
  return top * (1 - fy) + bottom * fy;
}

inline saa::ImagePlane resize(const saa::ImagePlane& img, int h, int w) {
  saa::ImagePlane out(h, w, img.channels());
  const double sy = static_cast<double>(img.height()) / h;
  const double sx = static_cast<double>(img.width()) / w;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < img.channels(); ++ch)
        out.at(r, c, ch) = sample(img, (r + 0.5) * sy - 0.5, (c + 0.5) * sx - 0.5, ch);
  return out;
}

// Tests every pixel of the image against the plus-shape predicate.
inline std::vector<saa::PixelCoord> cross_by_predicate(const saa::CruciformSpec& cross, int h,
                                                       int w) {
  std::vector<saa::PixelCoord> out;
  const int half_t = cross.thickness / 2;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int dr = std::abs(r - cross.center.row);
      const int dc = std::abs(c - cross.center.col);
      const bool horizontal = dr <= half_t && dc <= cross.arm_half_length;
      const bool vertical = dc <= half_t && dr <= cross.arm_half_length;
      if (horizontal || vertical) out.push_back({r, c});
    }
  return out;
}

// Recursive flood fill; returns component sizes in first-raster order.
inline std::vector<long> flood_components(const saa::BinaryMask& mask, int connectivity) {
  const int h = mask.height();
  const int w = mask.width();
  std::vector<char> seen(static_cast<std::size_t>(h) * w, 0);
  std::vector<long> sizes;
  std::function<long(int, int)> fill = [&](int r, int c) -> long {
    if (r < 0 || c < 0 || r >= h || c >= w) return 0;
    const std::size_t i = static_cast<std::size_t>(r) * w + c;
    if (seen[i] || !mask.at(r, c)) return 0;
    seen[i] = 1;
    long n = 1;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        if (connectivity == 4 && dr != 0 && dc != 0) continue;
        n += fill(r + dr, c + dc);
      }
    return n;
  };
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (mask.at(r, c) && !seen[static_cast<std::size_t>(r) * w + c]) sizes.push_back(fill(r, c));
  return sizes;
}

inline double evasion(int clean, int adv, long perturbed, long denominator) {
  if (clean == 0) return 0.0;
  const double sparsity = 2.0 - static_cast<double>(perturbed) / denominator;
  const double drop = 1.0 - static_cast<double>(std::min(clean, adv)) / clean;
  return sparsity * drop;
}

inline double yolo_loss(const saa::RawScores& s) {
  double best = 0.0;
  for (std::size_t b = 0; b < s.box_count(); ++b)
    for (int c = 0; c < s.num_classes; ++c)
      best = std::max(best, s.objectness[b] * s.class_probs[b * s.num_classes + c]);
  return best;
}

inline double frcnn_term1(const saa::RawScores& s) {
  double best = 0.0;
  const int cols = s.num_classes + 1;
  for (std::size_t b = 0; b < s.box_count(); ++b)
    for (int c = 1; c < cols; ++c) best = std::max(best, s.class_probs[b * cols + c]);
  return best;
}

inline double frcnn_term2(const saa::RawScores& s) {
  if (s.box_count() == 0) return 0.0;
  double total = 0.0;
  const int cols = s.num_classes + 1;
  for (std::size_t b = 0; b < s.box_count(); ++b) {
    double best = 0.0;
    for (int c = 1; c < cols; ++c) best = std::max(best, s.class_probs[b * cols + c]);
    total += best;
  }
  return total / static_cast<double>(s.box_count());
}

// Random two-stage scores: rows are normalized positive weights.
inline saa::RawScores random_two_stage(std::mt19937_64& rng, int boxes, int classes) {
  saa::RawScores s;
  s.style = saa::DetectorStyle::two_stage;
  s.num_classes = classes;
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int b = 0; b < boxes; ++b) {
    s.boxes.push_back({0.0, 0.0, 1.0, 1.0});
    std::vector<double> row(classes + 1);
    double total = 0.0;
    for (double& v : row) total += (v = u(rng));
    for (double v : row) s.class_probs.push_back(v / total);
  }
  return s;
}

inline saa::RawScores random_one_stage(std::mt19937_64& rng, int boxes, int classes) {
  saa::RawScores s;
  s.style = saa::DetectorStyle::one_stage;
  s.num_classes = classes;
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int b = 0; b < boxes; ++b) {
    s.boxes.push_back({0.0, 0.0, 1.0, 1.0});
    s.objectness.push_back(u(rng));
    std::vector<double> row(classes);
    double total = 0.0;
    for (double& v : row) total += (v = u(rng));
    for (double v : row) s.class_probs.push_back(v / total);
  }
  return s;
}

inline saa::BinaryMask random_mask(std::mt19937_64& rng, int h, int w, double density) {
  saa::BinaryMask mask(h, w);
  std::bernoulli_distribution on(density);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) mask.set(r, c, on(rng));
  return mask;
}

inline saa::ImagePlane random_lattice_image(std::mt19937_64& rng, int h, int w, int channels = 3) {
  saa::ImagePlane img(h, w, channels);
  std::uniform_int_distribution<int> byte(0, 255);
  for (double& v : img.data()) v = byte(rng) / 255.0;
  return img;
}

}  // namespace oracle
