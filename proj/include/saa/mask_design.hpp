#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "saa/detection.hpp"
#include "saa/imaging.hpp"

namespace saa {

struct PixelCoord {
  int row = 0;
  int col = 0;

  bool operator==(const PixelCoord&) const = default;
};

/// Plus-shaped patch: a horizontal and a vertical bar of `thickness` pixels
/// crossing at `center`, each reaching `arm_half_length` pixels out.
struct CruciformSpec {
  PixelCoord center;
  int arm_half_length = 0;
  int thickness = 1;

  bool operator==(const CruciformSpec&) const = default;
};

struct PatchLayout {
  int height = 0;
  int width = 0;
  std::vector<CruciformSpec> crosses;
  long budget = 0;

  bool operator==(const PatchLayout&) const = default;

  /// Throws std::invalid_argument if any cross is malformed or off-image.
  void validate() const;
};

/// Picks the bar thickness from the number of objects to cover: thick
/// crosses for few objects, thin ones once the scene gets crowded.
struct ThicknessPolicy {
  int thick = 5;
  int medium = 3;
  int thin = 1;
  int thick_max_objects = 2;
  int medium_max_objects = 5;

  int thickness_for(std::size_t object_count) const;
  void validate() const;

  /// Same thickness regardless of object count.
  static ThicknessPolicy fixed(int thickness);
};

/// floor(fraction * height * width).
long pixel_budget(int height, int width, double fraction = 0.02);

/// Pixel count of an unclipped cross.
long cross_area(int arm_half_length, int thickness);

/// One cross per box, centered on the box midpoint (rounded half-up), with
/// arms grown as far as an equal share of the budget allows.
PatchLayout layout_from_detections(std::span<const Box> boxes, int height, int width,
                                   long budget, const ThicknessPolicy& policy = {});

/// Pixels of one cross, clipped to the image, optionally limited to a
/// Chebyshev radius around the center.
std::vector<PixelCoord> cross_pixels(const CruciformSpec& cross, int height, int width,
                                     int max_radius = -1);

/// Union of all crosses. If the union exceeds the budget, arm tips (pixels
/// farthest from their center in Chebyshev distance) are trimmed one ring at
/// a time, cycling through the crosses.
BinaryMask render_layout(const PatchLayout& layout);

nlohmann::json layout_to_json(const PatchLayout& layout);
PatchLayout layout_from_json(const nlohmann::json& doc);

}  // namespace saa
